//! Flat `key = value` run configuration.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use super::output::fmt_f64;
use super::CliError;
use crate::analysis::Method;
use crate::exact::SolverSettings;
use crate::pulse::{Envelope, PulseParams};

macro_rules! config_keys {
    ($($key:ident = $default:expr => $help:literal;)*) => {
        /// Per-key command-line overrides, one `--key value` flag per
        /// config key.
        #[derive(Debug, Default, Clone, clap::Args)]
        pub struct Overrides {
            $(
                #[arg(long = stringify!($key), value_name = "VALUE", help = $help)]
                pub $key: Option<String>,
            )*
        }

        impl Overrides {
            pub fn pairs(&self) -> Vec<(String, String)> {
                let mut out = Vec::new();
                $(
                    if let Some(v) = &self.$key {
                        out.push((stringify!($key).to_string(), v.clone()));
                    }
                )*
                out
            }
        }

        /// Every recognised key with its default (`None`: no default).
        pub const KEYS: &[(&str, Option<&str>)] = &[$((stringify!($key), $default)),*];
    };
}

config_keys! {
    atol = Some("1e-12") => "absolute tolerance of the exact solver";
    cycles = Some("3") => "number of carrier cycles N";
    envelope = Some("gaussian") => "square, gaussian, sech or lorentzian";
    input = None => "surface CSV read by `contour`";
    intervals = Some("2400") => "time-grid intervals K";
    level = Some("0.1") => "contour level as a fraction";
    max_steps = Some("2000000") => "step budget of the exact solver";
    method = Some("finf") => "surface column traced by `contour`";
    methods = Some("f0,f1closed,f1exact,finf") => "comma-separated approximations";
    nx = Some("40") => "sweep points along omega0_ratio";
    ny = Some("40") => "sweep points along omegac_ratio";
    omega = Some("1") => "carrier angular frequency";
    omega0_ratio = Some("0.1") => "peak Rabi frequency over omega";
    omegac_ratio = Some("0.2") => "transition frequency over omega";
    phi = Some("0") => "carrier-envelope phase";
    rtol = Some("1e-10") => "relative tolerance of the exact solver";
    width_factor = Some("0.125") => "envelope width as a fraction of the pulse duration";
    x_max = Some("1") => "largest omega0_ratio of the sweep";
    x_min = Some("0.02") => "smallest omega0_ratio of the sweep";
    y_max = Some("5") => "largest omegac_ratio of the sweep";
    y_min = Some("0.02") => "smallest omegac_ratio of the sweep";
    zseries_order = Some("2") => "highest order of the z-series";
}

/// Validated configuration shared by all subcommands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub pulse: PulseParams,
    pub omega0_ratio: f64,
    pub omegac_ratio: f64,
    pub settings: SolverSettings,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub methods: BTreeSet<Method>,
    pub zseries_order: usize,
    pub input: Option<PathBuf>,
    pub method: Method,
    pub level: f64,
    /// Sorted `key=value` pairs separated by single spaces.
    pub canonical: String,
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {}: expected `key = value`", n + 1))
        })?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", n + 1)));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

struct Values(BTreeMap<String, String>);

impl Values {
    fn raw(&self, key: &str) -> &str {
        &self.0[key]
    }

    fn float(&self, key: &str) -> Result<f64, CliError> {
        let v = self.raw(key);
        match v.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(CliError::Usage(format!(
                "{key}: expected a finite number, got '{v}'"
            ))),
        }
    }

    fn positive(&self, key: &str) -> Result<f64, CliError> {
        let x = self.float(key)?;
        if x <= 0.0 {
            return Err(CliError::Usage(format!("{key} must be positive, got {x}")));
        }
        Ok(x)
    }

    fn count(&self, key: &str) -> Result<usize, CliError> {
        let v = self.raw(key);
        match v.parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Usage(format!(
                "{key}: expected a positive integer, got '{v}'"
            ))),
        }
    }
}

impl RunConfig {
    /// Later pairs win; unknown keys are rejected by name.
    pub fn resolve(pairs: &[(String, String)]) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for (k, d) in KEYS {
            if let Some(d) = d {
                map.insert(k.to_string(), d.to_string());
            }
        }
        for (k, v) in pairs {
            if !KEYS.iter().any(|(name, _)| name == k) {
                return Err(CliError::Usage(format!("unknown config key '{k}'")));
            }
            map.insert(k.clone(), v.clone());
        }
        let vals = Values(map);

        let omega = vals.positive("omega")?;
        let omega0_ratio = vals.float("omega0_ratio")?;
        let omegac_ratio = vals.float("omegac_ratio")?;
        let width = vals.positive("width_factor")?;
        let envelope = Envelope::from_name(vals.raw("envelope"), Some(width)).ok_or_else(|| {
            CliError::Usage(format!(
                "envelope: unknown shape '{}'",
                vals.raw("envelope")
            ))
        })?;
        let pulse = PulseParams::new(
            omega,
            omegac_ratio * omega,
            omega0_ratio * omega,
            vals.float("phi")?,
            vals.positive("cycles")?,
            envelope,
        )
        .map_err(|e| CliError::Usage(e.to_string()))?;

        let settings = SolverSettings {
            rtol: vals.positive("rtol")?,
            atol: vals.positive("atol")?,
            intervals: vals.count("intervals")?,
            max_steps: vals.count("max_steps")?,
        };
        settings
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;

        let axis = |lo: &str, hi: &str, n: &str| -> Result<Vec<f64>, CliError> {
            let (a, b, n) = (vals.positive(lo)?, vals.positive(hi)?, vals.count(n)?);
            if n > 1 && b <= a {
                return Err(CliError::Usage(format!("{hi} must exceed {lo}")));
            }
            Ok(linspace(a, b, n))
        };
        let x = axis("x_min", "x_max", "nx")?;
        let y = axis("y_min", "y_max", "ny")?;

        let methods = vals
            .raw("methods")
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<Method>()
                    .map_err(|e| CliError::Usage(format!("methods: {e}")))
            })
            .collect::<Result<BTreeSet<_>, _>>()?;
        let method = vals
            .raw("method")
            .parse::<Method>()
            .map_err(|e| CliError::Usage(format!("method: {e}")))?;
        let level = vals.positive("level")?;
        let zseries_order = vals.raw("zseries_order").parse::<usize>().map_err(|_| {
            CliError::Usage(format!(
                "zseries_order: expected an integer, got '{}'",
                vals.raw("zseries_order")
            ))
        })?;
        let input = vals.0.get("input").map(PathBuf::from);

        // canonical form from the parsed values
        let mut canon: BTreeMap<&str, String> = BTreeMap::new();
        for key in [
            "atol",
            "cycles",
            "level",
            "omega",
            "omega0_ratio",
            "omegac_ratio",
            "phi",
        ] {
            canon.insert(key, fmt_f64(vals.float(key)?));
        }
        for key in ["rtol", "width_factor", "x_max", "x_min", "y_max", "y_min"] {
            canon.insert(key, fmt_f64(vals.float(key)?));
        }
        for key in ["intervals", "max_steps", "nx", "ny", "zseries_order"] {
            canon.insert(key, vals.raw(key).parse::<usize>().unwrap().to_string());
        }
        canon.insert("envelope", envelope.name().to_string());
        canon.insert("method", method.name().to_string());
        canon.insert(
            "methods",
            methods
                .iter()
                .map(|m| m.name())
                .collect::<Vec<_>>()
                .join(","),
        );
        if let Some(v) = vals.0.get("input") {
            canon.insert("input", v.clone());
        }
        let canonical = canon
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ");

        Ok(Self {
            pulse,
            omega0_ratio,
            omegac_ratio,
            settings,
            x,
            y,
            methods,
            zseries_order,
            input,
            method,
            level,
            canonical,
        })
    }

    /// `# config: …` line heading every CSV.
    pub fn header_line(&self) -> String {
        format!("# config: {}\n", self.canonical)
    }
}
