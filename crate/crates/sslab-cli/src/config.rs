//! `key = value` configuration files for [`PrecisionConfig`], overridden by flags.
//!
//! Blank lines and lines starting with `#` are ignored. Recognized keys are
//! `rel_tol`, `contour_height`, `quad_points`, `series_max_terms` and `threads`.

use sslab_core::PrecisionConfig;

/// Settings read from a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    pub rel_tol: Option<f64>,
    pub contour_height: Option<f64>,
    pub quad_points: Option<usize>,
    pub series_max_terms: Option<usize>,
    pub threads: Option<usize>,
}

/// Parse a config file body. Errors name the offending line.
pub fn parse_config(text: &str) -> Result<FileConfig, String> {
    let mut c = FileConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| format!("config line {}: expected `key = value`, got `{line}`", i + 1))?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |what: &str| format!("config line {}: `{value}` is not a valid {what} for `{key}`", i + 1);
        match key {
            "rel_tol" => c.rel_tol = Some(value.parse().map_err(|_| bad("number"))?),
            "contour_height" => c.contour_height = Some(value.parse().map_err(|_| bad("number"))?),
            "quad_points" => c.quad_points = Some(value.parse().map_err(|_| bad("integer"))?),
            "series_max_terms" => c.series_max_terms = Some(value.parse().map_err(|_| bad("integer"))?),
            "threads" => c.threads = Some(value.parse().map_err(|_| bad("integer"))?),
            _ => return Err(format!("config line {}: unknown key `{key}`", i + 1)),
        }
    }
    Ok(c)
}

/// Flag values (all optional) for the precision settings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub rel_tol: Option<f64>,
    pub contour_height: Option<f64>,
    pub quad_points: Option<usize>,
    pub series_max_terms: Option<usize>,
}

/// Start from `base`, apply the file, then the flags; the result is validated.
pub fn resolve(base: PrecisionConfig, file: &FileConfig, flags: &Overrides) -> Result<PrecisionConfig, String> {
    let mut c = base;
    macro_rules! apply {
        ($f:ident) => {
            if let Some(v) = flags.$f.or(file.$f) {
                c.$f = v;
            }
        };
    }
    apply!(rel_tol);
    apply!(contour_height);
    apply!(quad_points);
    apply!(series_max_terms);
    c.validate().map_err(|e| e.to_string())?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_override() {
        let f = parse_config("# comment\nrel_tol = 1e-8\n\ncontour_height=50\nquad_points = 16\nseries_max_terms = 9000\nthreads = 2\n").unwrap();
        assert_eq!(f.rel_tol, Some(1e-8));
        assert_eq!(f.threads, Some(2));
        let flags = Overrides { rel_tol: Some(1e-10), ..Default::default() };
        let c = resolve(PrecisionConfig::default(), &f, &flags).unwrap();
        assert_eq!(c.rel_tol, 1e-10);
        assert_eq!(c.contour_height, 50.0);
        assert_eq!(c.quad_points, 16);
        assert_eq!(c.series_max_terms, 9000);
    }

    #[test]
    fn errors() {
        assert!(parse_config("rel_tol 1e-8").is_err());
        assert!(parse_config("bogus = 1").is_err());
        assert!(parse_config("quad_points = 1.5").is_err());
        let f = parse_config("rel_tol = 0.5").unwrap();
        assert!(resolve(PrecisionConfig::default(), &f, &Overrides::default()).is_err());
    }
}
