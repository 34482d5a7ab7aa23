//! Sweep configuration: flat `key = value` text, one setting per line.
//!
//! ```text
//! # uplink, full default grid plus Rayleigh
//! scheme = uplink-ndnoma
//! k_db = rayleigh, 5, 10
//! n = 50, 100
//! delta_db = -40, -30, -20, -10, -5, 0, 5
//! bits_per_point = 100000
//! ```
//!
//! Lists are comma separated, `#` starts a comment, unknown keys are
//! rejected. Keys not given keep the scheme's defaults. The Rician factor
//! `rayleigh` (or `-inf`) means `K = 0`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::detect::ThresholdRule;
use crate::error::{Error, Result};

/// Fewest bits per point accepted; smaller runs give meaningless intervals.
pub const MIN_BITS_PER_POINT: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    UplinkNdNoma,
    DownlinkNdNoma,
    OmaNoiseMod,
    PdNomaComparison,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::UplinkNdNoma,
        Scheme::DownlinkNdNoma,
        Scheme::OmaNoiseMod,
        Scheme::PdNomaComparison,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::UplinkNdNoma => "uplink-ndnoma",
            Scheme::DownlinkNdNoma => "downlink-ndnoma",
            Scheme::OmaNoiseMod => "oma-noisemod",
            Scheme::PdNomaComparison => "pdnoma-comparison",
        }
    }

    /// User labels in output order.
    pub fn users(self) -> &'static [&'static str] {
        match self {
            Scheme::PdNomaComparison => &["nd-u1", "nd-u2", "nd-avg", "pd-far", "pd-near", "pd-avg"],
            _ => &["u1", "u2"],
        }
    }

    pub fn x_kind(self) -> XKind {
        match self {
            Scheme::PdNomaComparison => XKind::GammaBarDb,
            _ => XKind::DeltaDb,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown scheme '{s}' (expected one of uplink-ndnoma, downlink-ndnoma, oma-noisemod, pdnoma-comparison)"
                ))
            })
    }
}

/// Quantity on the x axis of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum XKind {
    /// Useful-to-noise variance ratio δ in dB.
    DeltaDb,
    /// Average SNR γ̄ in dB.
    GammaBarDb,
}

impl XKind {
    pub fn name(self) -> &'static str {
        match self {
            XKind::DeltaDb => "delta_db",
            XKind::GammaBarDb => "gamma_bar_db",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "delta_db" => Some(XKind::DeltaDb),
            "gamma_bar_db" => Some(XKind::GammaBarDb),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub scheme: Scheme,
    /// Rician factors in dB; `-inf` is Rayleigh.
    pub k_db: Vec<f64>,
    pub n: Vec<usize>,
    /// δ grid in dB, or γ̄ grid in dB for the PD-NOMA comparison.
    pub x_db: Vec<f64>,
    pub alpha: f64,
    pub p_dbm: f64,
    pub beta: f64,
    pub psi: f64,
    pub rho_far: f64,
    pub bits_per_point: u64,
    pub j_points: u64,
    pub seed: u64,
    pub workers: Option<usize>,
    pub u2_threshold: ThresholdRule,
    /// Record wall-clock time per point. Off by default so that output is
    /// byte-reproducible.
    pub timing: bool,
}

impl SweepConfig {
    /// Defaults for `scheme`: the standard parameter grid for the ND-NOMA
    /// and OMA schemes, and a 10-point 0–30 dB SNR grid at `N = 150` over
    /// Rayleigh fading for the PD-NOMA comparison.
    pub fn defaults(scheme: Scheme) -> Self {
        let base = SweepConfig {
            scheme,
            k_db: vec![5.0, 10.0],
            n: vec![50, 100],
            x_db: vec![-40.0, -30.0, -20.0, -10.0, -5.0, 0.0, 5.0],
            alpha: 10.0,
            p_dbm: 30.0,
            beta: 0.01,
            psi: 0.99,
            rho_far: 0.8,
            bits_per_point: 100_000,
            j_points: 100_000,
            seed: 1,
            workers: None,
            u2_threshold: ThresholdRule::EqualError,
            timing: false,
        };
        match scheme {
            Scheme::PdNomaComparison => SweepConfig {
                k_db: vec![f64::NEG_INFINITY],
                n: vec![150],
                x_db: (0..10).map(|i| 30.0 * i as f64 / 9.0).collect(),
                psi: 0.5,
                ..base
            },
            _ => base,
        }
    }

    /// Per-user power budget in watts.
    pub fn p_watts(&self) -> f64 {
        db_to_linear(self.p_dbm - 30.0)
    }

    pub fn n_points(&self) -> usize {
        self.k_db.len() * self.n.len() * self.x_db.len()
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses a configuration; `scheme` must be present.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value'", i + 1)))?;
            let key = canonical_key(key.trim());
            if entries.iter().any(|(k, _, _): &(&str, &str, usize)| *k == key) {
                return Err(Error::Config(format!("line {}: duplicate key '{key}'", i + 1)));
            }
            entries.push((key, value.trim(), i + 1));
        }
        let scheme = entries
            .iter()
            .find(|(k, _, _)| *k == "scheme")
            .ok_or_else(|| Error::Config("missing 'scheme'".into()))?
            .1
            .parse::<Scheme>()?;
        let mut cfg = Self::defaults(scheme);
        for (key, value, line) in entries {
            cfg.set(key, value)
                .map_err(|msg| Error::Config(format!("line {line}: {key}: {msg}")))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let grid_key = self.scheme.x_kind().name();
        match key {
            "scheme" => {}
            "k_db" => self.k_db = parse_list(value, parse_k_db)?,
            "n" => self.n = parse_list(value, parse_num)?,
            k if k == grid_key => self.x_db = parse_list(value, parse_num)?,
            "delta_db" | "gamma_bar_db" => {
                return Err(format!("not used by scheme {} (use {grid_key})", self.scheme))
            }
            "alpha" => self.alpha = parse_num(value)?,
            "p_dbm" => self.p_dbm = parse_num(value)?,
            "beta" => self.beta = parse_num(value)?,
            "psi" => self.psi = parse_num(value)?,
            "rho_far" => self.rho_far = parse_num(value)?,
            "bits_per_point" => self.bits_per_point = parse_count(value)?,
            "j_points" => self.j_points = parse_count(value)?,
            "seed" => self.seed = parse_num(value)?,
            "workers" => self.workers = Some(parse_num(value)?),
            "u2_threshold" => {
                self.u2_threshold = ThresholdRule::parse(value)
                    .ok_or_else(|| format!("expected 'optimal' or 'chi', got '{value}'"))?
            }
            "timing" => self.timing = parse_num(value)?,
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    /// Checks ranges and grid contents.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.k_db.is_empty() || self.n.is_empty() || self.x_db.is_empty() {
            return fail("grids must be non-empty".into());
        }
        if let Some(k) = self.k_db.iter().find(|k| k.is_nan() || **k == f64::INFINITY) {
            return fail(format!("invalid k_db {k}"));
        }
        if let Some(x) = self.x_db.iter().find(|x| !x.is_finite()) {
            return fail(format!("invalid {} value {x}", self.scheme.x_kind().name()));
        }
        if let Some(n) = self.n.iter().find(|&&n| n < 2) {
            return fail(format!("n must be at least 2, got {n}"));
        }
        if self.scheme == Scheme::OmaNoiseMod {
            if let Some(n) = self.n.iter().find(|&&n| n % 2 != 0 || n < 4) {
                return fail(format!("oma-noisemod needs even n >= 4, got {n}"));
            }
        }
        if !(self.alpha >= 1.0 && self.alpha.is_finite()) {
            return fail(format!("alpha must be at least 1, got {}", self.alpha));
        }
        if !self.p_dbm.is_finite() {
            return fail(format!("invalid p_dbm {}", self.p_dbm));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return fail(format!("beta must lie in (0, 1), got {}", self.beta));
        }
        if !(self.psi > 0.0 && self.psi < 1.0) {
            return fail(format!("psi must lie in (0, 1), got {}", self.psi));
        }
        if !(self.rho_far >= 0.5 && self.rho_far < 1.0) {
            return fail(format!("rho_far must lie in [0.5, 1), got {}", self.rho_far));
        }
        if self.bits_per_point < MIN_BITS_PER_POINT {
            return fail(format!(
                "bits_per_point must be at least {MIN_BITS_PER_POINT}, got {}",
                self.bits_per_point
            ));
        }
        if self.j_points < crate::theory::MIN_POINTS {
            return fail(format!(
                "j_points must be at least {}, got {}",
                crate::theory::MIN_POINTS,
                self.j_points
            ));
        }
        if self.workers == Some(0) {
            return fail("workers must be positive".into());
        }
        Ok(())
    }
}

/// Maps long key spellings onto the short ones.
fn canonical_key(key: &str) -> &str {
    match key {
        "k_db_list" => "k_db",
        "n_list" => "n",
        "delta_db_grid" => "delta_db",
        "gamma_bar_db_grid" => "gamma_bar_db",
        "master_seed" => "seed",
        k => k,
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn parse_num<T: FromStr>(s: &str) -> std::result::Result<T, String> {
    s.trim().parse().map_err(|_| format!("cannot parse '{}'", s.trim()))
}

/// Counts accept scientific notation (`1e5`) as long as the value is integral.
pub fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = parse_num(s)?;
    if v >= 0.0 && v.fract() == 0.0 && v < 2f64.powi(63) {
        Ok(v as u64)
    } else {
        Err(format!("expected a non-negative integer, got '{s}'"))
    }
}

/// Parses a Rician factor in dB; `rayleigh` maps to `-inf`.
pub fn parse_k_db(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("rayleigh") {
        return Ok(f64::NEG_INFINITY);
    }
    parse_num(s)
}

fn parse_list<T>(
    s: &str,
    item: impl Fn(&str) -> std::result::Result<T, String>,
) -> std::result::Result<Vec<T>, String> {
    s.split(',').map(|v| item(v.trim())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_the_parameter_table() {
        let c = SweepConfig::defaults(Scheme::UplinkNdNoma);
        assert_eq!(c.k_db, vec![5.0, 10.0]);
        assert_eq!(c.n, vec![50, 100]);
        assert_eq!(c.x_db.first(), Some(&-40.0));
        assert_eq!(c.x_db.last(), Some(&5.0));
        assert_eq!(c.alpha, 10.0);
        assert!((c.p_watts() - 1.0).abs() < 1e-15);
        assert_eq!(c.beta, 0.01);
        c.validate().unwrap();

        let p = SweepConfig::defaults(Scheme::PdNomaComparison);
        assert_eq!(p.x_db.len(), 10);
        assert_eq!(p.x_db[9], 30.0);
        assert_eq!(p.n, vec![150]);
        assert_eq!(p.k_db, vec![f64::NEG_INFINITY]);
    }

    #[test]
    fn parses_lists_comments_and_rayleigh() {
        let c = SweepConfig::parse(
            "# grid\nscheme = downlink-ndnoma\nk_db = rayleigh, 5 , 10\nn=50\n\
             delta_db = -5, 0, 5  # coarse\nbits_per_point = 1e5\nu2_threshold = chi\ntiming = true\n",
        )
        .unwrap();
        assert_eq!(c.scheme, Scheme::DownlinkNdNoma);
        assert_eq!(c.k_db, vec![f64::NEG_INFINITY, 5.0, 10.0]);
        assert_eq!(c.n, vec![50]);
        assert_eq!(c.x_db, vec![-5.0, 0.0, 5.0]);
        assert_eq!(c.bits_per_point, 100_000);
        assert_eq!(c.u2_threshold, ThresholdRule::Scaled);
        assert!(c.timing);
        assert_eq!(c.n_points(), 9);
    }

    #[test]
    fn long_key_names_are_aliases() {
        let c = SweepConfig::parse(
            "scheme = uplink-ndnoma\nk_db_list = 10\nn_list = 100\ndelta_db_grid = 0\nmaster_seed = 9\n",
        )
        .unwrap();
        assert_eq!((c.k_db, c.n, c.x_db, c.seed), (vec![10.0], vec![100], vec![0.0], 9));
        assert!(SweepConfig::parse("scheme = uplink-ndnoma\nseed = 1\nmaster_seed = 2\n").is_err());
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            "n = 50\n",
            "scheme = sideways\n",
            "scheme = uplink-ndnoma\ncolour = blue\n",
            "scheme = uplink-ndnoma\nn = 50\nn = 100\n",
            "scheme = uplink-ndnoma\nbits_per_point = 999\n",
            "scheme = uplink-ndnoma\nj_points = 10\n",
            "scheme = uplink-ndnoma\nalpha = 0.5\n",
            "scheme = uplink-ndnoma\nn = 1\n",
            "scheme = oma-noisemod\nn = 51\n",
            "scheme = uplink-ndnoma\ngamma_bar_db = 0, 10\n",
            "scheme = pdnoma-comparison\ndelta_db = 0\n",
            "scheme = uplink-ndnoma\ndelta_db = \n",
            "scheme = uplink-ndnoma\nk_db = nan\n",
            "scheme = uplink-ndnoma\njust words\n",
        ] {
            assert!(
                matches!(SweepConfig::parse(text), Err(Error::Config(_))),
                "accepted: {text:?}"
            );
        }
    }

    #[test]
    fn missing_file_is_a_config_error() {
        let r = SweepConfig::from_file(Path::new("/nonexistent/dir/sweep.cfg"));
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
    }
}
