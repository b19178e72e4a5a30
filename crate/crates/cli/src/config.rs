//! Run configuration: defaults, `key = value` files and validation.

use std::fmt;
use std::path::PathBuf;

use ballharm_core::Tolerances;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn as_str(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// A rejected configuration value. Maps to exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dim: usize,
    pub level: usize,
    /// Monte Carlo sample count; `0` disables Monte Carlo cross-checks.
    pub mc: usize,
    pub seed: u64,
    pub radii: Vec<f64>,
    pub c: f64,
    pub z: Option<Vec<f64>>,
    pub grid: usize,
    pub tol: Tolerances,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dim: 2,
            level: 16,
            mc: 0,
            seed: 20_240_601,
            radii: vec![0.0, 0.25, 0.5, 0.75],
            c: 0.5,
            z: None,
            grid: 1000,
            tol: Tolerances::default(),
            format: None,
            out: None,
        }
    }
}

/// Optional settings from one source (a file or the command line).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub dim: Option<usize>,
    pub level: Option<usize>,
    pub mc: Option<usize>,
    pub seed: Option<u64>,
    pub radii: Option<Vec<f64>>,
    pub c: Option<f64>,
    pub z: Option<Vec<f64>>,
    pub grid: Option<usize>,
    pub tol_smooth: Option<f64>,
    pub tol_nonsmooth: Option<f64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.trim().parse().or_else(|_| err(format!("invalid value for {key}: {v:?}")))
}

/// Comma-separated reals. An empty string gives an empty list.
pub fn parse_list(key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    let v = v.trim();
    if v.is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|s| parse_num(key, s)).collect()
}

pub fn parse_format(v: &str) -> Result<Format, ConfigError> {
    match v.trim() {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        other => err(format!("unknown format {other:?} (expected csv or json)")),
    }
}

impl Overrides {
    /// Sets one key. Keys are the flag names without dashes; `_` and `-`
    /// are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key.replace('_', "-").as_str() {
            "dim" => self.dim = Some(parse_num(key, value)?),
            "level" => self.level = Some(parse_num(key, value)?),
            "mc" => self.mc = Some(parse_num(key, value)?),
            "seed" => self.seed = Some(parse_num(key, value)?),
            "radii" | "radius" => self.radii = Some(parse_list(key, value)?),
            "c" => self.c = Some(parse_num(key, value)?),
            "z" => self.z = Some(parse_list(key, value)?),
            "grid" => self.grid = Some(parse_num(key, value)?),
            "tol-smooth" => self.tol_smooth = Some(parse_num(key, value)?),
            "tol-nonsmooth" => self.tol_nonsmooth = Some(parse_num(key, value)?),
            "format" => self.format = Some(parse_format(value)?),
            "out" => self.out = Some(PathBuf::from(value.trim())),
            _ => return err(format!("unknown configuration key {key:?}")),
        }
        Ok(())
    }

    /// Parses UTF-8 `key = value` lines. Blank lines and lines starting
    /// with `#` are skipped.
    pub fn parse_file(text: &str) -> Result<Self, ConfigError> {
        let mut o = Self::default();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError(format!("line {}: expected key = value", k + 1)))?;
            o.set(key.trim(), value).map_err(|e| ConfigError(format!("line {}: {e}", k + 1)))?;
        }
        Ok(o)
    }
}

impl RunConfig {
    pub fn apply(&mut self, o: &Overrides) {
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = &o.$f { self.$f = v.clone(); } )* };
        }
        take!(dim, level, mc, seed, radii, c, grid);
        if let Some(z) = &o.z {
            self.z = Some(z.clone());
        }
        if let Some(t) = o.tol_smooth {
            self.tol.smooth = t;
        }
        if let Some(t) = o.tol_nonsmooth {
            self.tol.nonsmooth = t;
        }
        if let Some(f) = o.format {
            self.format = Some(f);
        }
        if let Some(p) = &o.out {
            self.out = Some(p.clone());
        }
    }

    /// Defaults, then the file, then the flags.
    pub fn resolve(file: Option<&Overrides>, flags: &Overrides) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        if let Some(f) = file {
            cfg.apply(f);
        }
        cfg.apply(flags);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(1..=6).contains(&self.dim) {
            return err(format!("dim must be in 1..=6 (got {})", self.dim));
        }
        if self.level < 2 {
            return err(format!("level must be at least 2 (got {})", self.level));
        }
        if self.mc != 0 && self.mc < 1000 {
            return err(format!("mc must be 0 (off) or at least 1000 (got {})", self.mc));
        }
        if self.radii.is_empty() {
            return err("radius grid is empty");
        }
        if let Some(r) = self.radii.iter().find(|r| !(0.0..1.0).contains(*r)) {
            return err(format!("radius {r} is outside [0, 1)"));
        }
        if !(self.c > 0.0 && self.c < 1.0) {
            return err(format!("c must lie in (0, 1) (got {})", self.c));
        }
        if let Some(z) = &self.z {
            if z.len() != 2 * self.dim {
                return err(format!("z needs {} real coordinates for dim {} (got {})", 2 * self.dim, self.dim, z.len()));
            }
            let r2: f64 = z.iter().map(|x| x * x).sum();
            if !(r2 < 1.0) {
                return err(format!("z has norm {} and is not inside the unit ball", r2.sqrt()));
            }
        }
        if self.grid == 0 {
            return err("grid must be positive");
        }
        for (name, t) in [("tol-smooth", self.tol.smooth), ("tol-nonsmooth", self.tol.nonsmooth)] {
            if !(t > 0.0 && t.is_finite()) {
                return err(format!("{name} must be a positive number (got {t})"));
            }
        }
        Ok(())
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    /// The settings that determine results. The output path is left out so
    /// reports written to different files stay comparable.
    pub fn to_json(&self) -> Value {
        json!({
            "dim": self.dim,
            "level": self.level,
            "mc": self.mc,
            "seed": self.seed,
            "radii": self.radii,
            "c": self.c,
            "z": self.z,
            "grid": self.grid,
            "tol_smooth": self.tol.smooth,
            "tol_nonsmooth": self.tol.nonsmooth,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags_precedence() {
        let file = Overrides::parse_file("# comment\ndim = 3\nlevel=8\n\nradii = 0.1, 0.2\nseed = 9\n").unwrap();
        let mut flags = Overrides::default();
        flags.set("level", "12").unwrap();
        let cfg = RunConfig::resolve(Some(&file), &flags).unwrap();
        assert_eq!(cfg.dim, 3);
        assert_eq!(cfg.level, 12);
        assert_eq!(cfg.radii, vec![0.1, 0.2]);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.mc, 0);
    }

    #[test]
    fn rejects_bad_values() {
        let bad =
            [("dim", "0"), ("dim", "7"), ("level", "1"), ("mc", "10"), ("radii", ""), ("radii", "1.0"), ("c", "1"), ("tol-smooth", "0")];
        for (k, v) in bad {
            let mut o = Overrides::default();
            o.set(k, v).unwrap();
            assert!(RunConfig::resolve(None, &o).is_err(), "{k}={v}");
        }
        let mut o = Overrides::default();
        o.set("z", "0.9,0.9,0,0").unwrap();
        assert!(RunConfig::resolve(None, &o).is_err());
        assert!(Overrides::parse_file("nonsense").is_err());
        assert!(Overrides::parse_file("colour = red").is_err());
        assert!(Overrides::default().set("dim", "two").is_err());
        assert!(parse_format("xml").is_err());
    }
}
