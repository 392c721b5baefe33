//! Declarative run configuration: strict JSON schema with per-scenario
//! parameter tables and a unit resolver that normalizes every physical
//! input to the module's native dimensionless group.
//!
//! Validation is collective: a bad config reports every offending key at
//! once (unknown keys, missing required keys, type and unit mistakes), not
//! just the first one found.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Map, Value};

const TAU: f64 = std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Couplings,
    Stirap,
    Losses,
    FqhReport,
    Grow,
}

impl Scenario {
    pub fn all() -> [Scenario; 5] {
        [
            Scenario::Couplings,
            Scenario::Stirap,
            Scenario::Losses,
            Scenario::FqhReport,
            Scenario::Grow,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Couplings => "couplings",
            Scenario::Stirap => "stirap",
            Scenario::Losses => "losses",
            Scenario::FqhReport => "fqh-report",
            Scenario::Grow => "grow",
        }
    }

    pub fn from_name(name: &str) -> Option<Scenario> {
        Scenario::all().into_iter().find(|s| s.name() == name)
    }

    pub fn describe(&self) -> &'static str {
        match self {
            Scenario::Couplings => {
                "Tabulates the stage-one or stage-two photon-spin coupling table by quadrature."
            }
            Scenario::Stirap => {
                "Runs the chained two-stage adiabatic transfer and records mode populations."
            }
            Scenario::Losses => {
                "Maps the insertion fidelity (survival times dark-state overlap) over a drive/coupling grid."
            }
            Scenario::FqhReport => {
                "Reports ground-state expansions, zero-energy sector dimensions, gaps and pump overlaps."
            }
            Scenario::Grow => {
                "Simulates the full state-growing protocol (pump pulses alternating with flux insertions)."
            }
        }
    }
}

/// Dimension of a physical input; fixes which unit strings are accepted and
/// what the native (bare-number) interpretation is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitDim {
    /// Pure number; only "dimensionless" is accepted as an explicit unit.
    Plain,
    /// Angular frequency, native rad/us. "cycles/us" and "MHz" multiply by
    /// 2 pi; "rad/us" and "1/us" pass through.
    Frequency,
    /// Time, native microseconds.
    TimeMicro,
    /// Energy in the growing protocol's unit system; "V0" multiplies by the
    /// resolved interaction strength.
    EnergyV0,
    /// Time in the growing protocol's unit system; "1/V0" divides by the
    /// resolved interaction strength.
    TimeV0,
}

impl UnitDim {
    fn accepted(&self) -> &'static str {
        match self {
            UnitDim::Plain => "dimensionless",
            UnitDim::Frequency => "rad/us, 1/us, cycles/us, MHz",
            UnitDim::TimeMicro => "us",
            UnitDim::EnergyV0 => "dimensionless, V0",
            UnitDim::TimeV0 => "dimensionless, 1/V0",
        }
    }

    fn apply(&self, value: f64, unit: &str, v0: f64) -> Option<f64> {
        match (self, unit) {
            (UnitDim::Plain, "dimensionless") => Some(value),
            (UnitDim::Frequency, "rad/us") | (UnitDim::Frequency, "1/us") => Some(value),
            (UnitDim::Frequency, "cycles/us") | (UnitDim::Frequency, "MHz") => Some(value * TAU),
            (UnitDim::TimeMicro, "us") => Some(value),
            (UnitDim::EnergyV0, "dimensionless") => Some(value),
            (UnitDim::EnergyV0, "V0") => Some(value * v0),
            (UnitDim::TimeV0, "dimensionless") => Some(value),
            (UnitDim::TimeV0, "1/V0") => Some(value / v0),
            _ => None,
        }
    }
}

/// Shape of one parameter value.
#[derive(Debug, Clone, Copy)]
pub enum Kind {
    /// Bare number or `{"value": x, "unit": "..."}`.
    Quantity(UnitDim),
    /// Nonnegative integer.
    Int,
    /// One of a fixed set of strings.
    Text(&'static [&'static str]),
    /// Array of numbers.
    Floats,
    /// Array of nonnegative integers.
    Ints,
    /// `{"min": x, "max": y, "count": n}` grid axis.
    Grid,
}

impl Kind {
    pub fn shape(&self) -> String {
        match self {
            Kind::Quantity(dim) => format!("number or {{value, unit}} (units: {})", dim.accepted()),
            Kind::Int => "nonnegative integer".to_string(),
            Kind::Text(options) => format!("one of {options:?}"),
            Kind::Floats => "array of numbers".to_string(),
            Kind::Ints => "array of nonnegative integers".to_string(),
            Kind::Grid => "{min, max, count}".to_string(),
        }
    }
}

pub struct ParamSpec {
    pub key: &'static str,
    pub kind: Kind,
    pub required: bool,
    pub doc: &'static str,
}

const fn param(key: &'static str, kind: Kind, required: bool, doc: &'static str) -> ParamSpec {
    ParamSpec { key, kind, required, doc }
}

static COUPLINGS_SCHEMA: [ParamSpec; 4] = {
    use Kind::*;
    use UnitDim::*;
    [
        param("profile", Text(&["step1", "step2"]), true, "which transfer stage to tabulate"),
        param("a", Quantity(Plain), false, "profile cutoff in waist units (required for step1)"),
        param("m_max", Int, false, "largest sector index (default 3)"),
        param("n_max", Int, false, "largest radial index (default 4)"),
    ]
};

static STIRAP_SCHEMA: [ParamSpec; 11] = {
    use Kind::*;
    use UnitDim::*;
    [
        param("omega_peak", Quantity(Frequency), true, "peak pulse frequency"),
        param("g", Quantity(Frequency), true, "cavity coupling, applied to every retained mode"),
        param("delta", Quantity(Frequency), true, "two-photon detuning"),
        param("gamma", Quantity(Frequency), false, "excited-state decay rate (default 0)"),
        param("a", Quantity(Plain), false, "stage-one profile cutoff (default 0.01)"),
        param("t_char", Quantity(TimeMicro), false, "characteristic pulse time (default 1 us)"),
        param("tau1", Quantity(Plain), false, "dimensionless stage switch time (default 6)"),
        param("n_max", Int, false, "radial truncation (default 5)"),
        param("m_sector", Int, false, "starting sector index (default 0)"),
        param("cycles", Int, false, "number of chained insertions (default 1)"),
        param("samples_per_segment", Int, false, "trace samples per stage (default 201)"),
    ]
};

static LOSSES_SCHEMA: [ParamSpec; 6] = {
    use Kind::*;
    use UnitDim::*;
    [
        param("gamma_t", Quantity(Plain), false, "decay rate times sweep duration (default 100)"),
        param("a", Quantity(Plain), false, "profile cutoff in waist units (default 0.005)"),
        param("xi", Quantity(Plain), false, "cloud radius in waist units (default 0.25)"),
        param("density", Text(&["gaussian"]), false, "radial density profile (default gaussian)"),
        param("omega_t_grid", Grid, false, "drive axis (default 10..100, 10 points)"),
        param("g_t_grid", Grid, false, "coupling axis (default 1..50, 50 points)"),
    ]
};

static FQH_REPORT_SCHEMA: [ParamSpec; 4] = {
    use Kind::*;
    use UnitDim::*;
    [
        param("max_photons", Int, false, "largest photon number to report (default 3, cap 5)"),
        param("c6", Quantity(Plain), false, "van der Waals coefficient (default 8/3)"),
        param("a_b", Quantity(Plain), false, "blockade radius (default 1)"),
        param("l_b", Quantity(Plain), false, "magnetic length analogue (default 1)"),
    ]
};

static GROW_SCHEMA: [ParamSpec; 13] = {
    use Kind::*;
    use UnitDim::*;
    [
        param("n_target", Int, false, "photon number to grow to (default 3)"),
        param("v0", Quantity(Plain), false, "interaction strength, sets the unit system (default 1)"),
        param("delta0", Quantity(EnergyV0), false, "manifold gap at the sweep endpoints (default 10)"),
        param("omega_p", Quantity(EnergyV0), false, "pump drive amplitude (default 0.05)"),
        param("g_a", Quantity(EnergyV0), false, "first-half sweep coupling (default 0.2)"),
        param("g_b", Quantity(EnergyV0), false, "second-half sweep coupling (default 0.2)"),
        param("tau_f", Quantity(TimeV0), false, "duration of one flux insertion (default 5000)"),
        param("gamma_eff", Quantity(EnergyV0), false, "effective loss rate, analytic estimate only (default 0)"),
        param("lambda_n", Floats, false, "non-adiabaticity amplitudes for the fidelity estimate"),
        param("ramp_fraction", Quantity(Plain), false, "sine-squared coupling ramp fraction (default 0)"),
        param("sample_interval", Quantity(TimeV0), false, "trace sample spacing (default 5)"),
        param("lll_modes", Ints, false, "lowest-manifold ladder override (l = 3m)"),
        param("first_manifold_modes", Ints, false, "first-manifold ladder override (l = 3m + 1)"),
    ]
};

pub fn schema(scenario: Scenario) -> &'static [ParamSpec] {
    match scenario {
        Scenario::Couplings => &COUPLINGS_SCHEMA,
        Scenario::Stirap => &STIRAP_SCHEMA,
        Scenario::Losses => &LOSSES_SCHEMA,
        Scenario::FqhReport => &FQH_REPORT_SCHEMA,
        Scenario::Grow => &GROW_SCHEMA,
    }
}

/// Everything wrong with a config, reported together.
#[derive(Debug, Default)]
pub struct ConfigIssues {
    pub unknown_keys: Vec<String>,
    pub missing_keys: Vec<String>,
    pub details: Vec<String>,
}

impl ConfigIssues {
    pub fn is_empty(&self) -> bool {
        self.unknown_keys.is_empty() && self.missing_keys.is_empty() && self.details.is_empty()
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigIssues),
    Io { path: String, message: String },
    Numeric(String),
}

impl CliError {
    pub fn numeric(e: impl fmt::Display) -> Self {
        CliError::Numeric(e.to_string())
    }

    pub fn report(&self) -> Value {
        match self {
            CliError::Config(issues) => json!({
                "error": {
                    "kind": "config",
                    "message": "configuration rejected",
                    "unknown_keys": issues.unknown_keys,
                    "missing_keys": issues.missing_keys,
                    "details": issues.details,
                }
            }),
            CliError::Io { path, message } => json!({
                "error": { "kind": "io", "message": message, "path": path }
            }),
            CliError::Numeric(message) => json!({
                "error": { "kind": "numeric", "message": message }
            }),
        }
    }
}

/// A parameter value after unit resolution.
#[derive(Debug, Clone, PartialEq)]
pub enum Resolved {
    Num(f64),
    Int(u64),
    Text(String),
    Nums(Vec<f64>),
    Ints(Vec<u32>),
    Grid { min: f64, max: f64, count: u64 },
}

impl Resolved {
    fn to_value(&self) -> Value {
        match self {
            Resolved::Num(x) => json!(x),
            Resolved::Int(n) => json!(n),
            Resolved::Text(s) => json!(s),
            Resolved::Nums(v) => json!(v),
            Resolved::Ints(v) => json!(v),
            Resolved::Grid { min, max, count } => {
                json!({ "min": min, "max": max, "count": count })
            }
        }
    }
}

/// A parsed, validated, unit-resolved run configuration.
#[derive(Debug)]
pub struct LoadedConfig {
    pub scenario: Scenario,
    pub output: Option<String>,
    pub csv: bool,
    pub json: bool,
    /// The config file exactly as given.
    pub raw: Value,
    pub resolved: BTreeMap<String, Resolved>,
}

impl LoadedConfig {
    pub fn num(&self, key: &str, default: f64) -> f64 {
        match self.resolved.get(key) {
            Some(Resolved::Num(x)) => *x,
            _ => default,
        }
    }

    pub fn int(&self, key: &str, default: u64) -> u64 {
        match self.resolved.get(key) {
            Some(Resolved::Int(n)) => *n,
            _ => default,
        }
    }

    pub fn text(&self, key: &str, default: &str) -> String {
        match self.resolved.get(key) {
            Some(Resolved::Text(s)) => s.clone(),
            _ => default.to_string(),
        }
    }

    pub fn nums(&self, key: &str) -> Option<Vec<f64>> {
        match self.resolved.get(key) {
            Some(Resolved::Nums(v)) => Some(v.clone()),
            _ => None,
        }
    }

    pub fn ints(&self, key: &str) -> Option<Vec<u32>> {
        match self.resolved.get(key) {
            Some(Resolved::Ints(v)) => Some(v.clone()),
            _ => None,
        }
    }

    pub fn grid(&self, key: &str, default: (f64, f64, u64)) -> (f64, f64, u64) {
        match self.resolved.get(key) {
            Some(Resolved::Grid { min, max, count }) => (*min, *max, *count),
            _ => default,
        }
    }

    pub fn resolved_value(&self) -> Value {
        Value::Object(
            self.resolved
                .iter()
                .map(|(k, v)| (k.clone(), v.to_value()))
                .collect::<Map<String, Value>>(),
        )
    }
}

pub fn parse_config(text: &str) -> Result<LoadedConfig, CliError> {
    let raw: Value = serde_json::from_str(text).map_err(|e| {
        CliError::Config(ConfigIssues {
            details: vec![format!("not valid JSON: {e}")],
            ..Default::default()
        })
    })?;
    let mut issues = ConfigIssues::default();
    let top = match raw.as_object() {
        Some(m) => m,
        None => {
            issues.details.push("top level must be a JSON object".to_string());
            return Err(CliError::Config(issues));
        }
    };

    for key in top.keys() {
        if !matches!(key.as_str(), "scenario" | "parameters" | "output" | "formats") {
            issues.unknown_keys.push(key.clone());
        }
    }

    let scenario = match top.get("scenario") {
        None => {
            issues.missing_keys.push("scenario".to_string());
            None
        }
        Some(Value::String(name)) => {
            let s = Scenario::from_name(name);
            if s.is_none() {
                issues.details.push(format!(
                    "scenario: unknown scenario {name:?}; expected one of {:?}",
                    Scenario::all().map(|s| s.name())
                ));
            }
            s
        }
        Some(_) => {
            issues.details.push("scenario: expected a string".to_string());
            None
        }
    };

    let output = match top.get("output") {
        None => None,
        Some(Value::String(path)) => Some(path.clone()),
        Some(_) => {
            issues.details.push("output: expected a string path".to_string());
            None
        }
    };

    let (mut csv, mut json_fmt) = (true, true);
    if let Some(v) = top.get("formats") {
        match v.as_array() {
            Some(entries) => {
                csv = false;
                json_fmt = false;
                for (i, e) in entries.iter().enumerate() {
                    match e.as_str() {
                        Some("csv") => csv = true,
                        Some("json") => json_fmt = true,
                        _ => issues
                            .details
                            .push(format!("formats[{i}]: expected \"csv\" or \"json\"")),
                    }
                }
            }
            None => issues.details.push("formats: expected an array".to_string()),
        }
    }

    let empty = Map::new();
    let params = match top.get("parameters") {
        None => &empty,
        Some(Value::Object(m)) => m,
        Some(_) => {
            issues.details.push("parameters: expected an object".to_string());
            &empty
        }
    };

    let mut resolved = BTreeMap::new();
    if let Some(scenario) = scenario {
        let specs = schema(scenario);
        for spec in specs {
            if spec.required && !params.contains_key(spec.key) {
                issues.missing_keys.push(format!("parameters.{}", spec.key));
            }
        }
        // First pass: structural parse (no unit application yet).
        let mut pending: Vec<(&ParamSpec, PendingValue)> = Vec::new();
        for (key, value) in params {
            match specs.iter().find(|s| s.key == key.as_str()) {
                None => issues.unknown_keys.push(format!("parameters.{key}")),
                Some(spec) => {
                    if let Some(p) = parse_param(spec, value, &mut issues) {
                        pending.push((spec, p));
                    }
                }
            }
        }
        // Second pass: apply units. The unit system scale must resolve
        // first so V0-relative inputs can refer to it.
        let v0 = pending
            .iter()
            .find_map(|(spec, p)| match (spec.key, p) {
                ("v0", PendingValue::Quantity { value, unit: None }) => Some(*value),
                _ => None,
            })
            .unwrap_or(1.0);
        for (spec, p) in pending {
            match p {
                PendingValue::Quantity { value, unit } => {
                    let dim = match spec.kind {
                        Kind::Quantity(dim) => dim,
                        _ => unreachable!("quantity parsed for non-quantity spec"),
                    };
                    let applied = match &unit {
                        None => Some(value),
                        Some(u) => dim.apply(value, u, v0),
                    };
                    match applied {
                        Some(x) => {
                            resolved.insert(spec.key.to_string(), Resolved::Num(x));
                        }
                        None => issues.details.push(format!(
                            "parameters.{}: unit {:?} not valid here (accepted: {})",
                            spec.key,
                            unit.unwrap_or_default(),
                            dim.accepted()
                        )),
                    }
                }
                PendingValue::Done(r) => {
                    resolved.insert(spec.key.to_string(), r);
                }
            }
        }
    }

    if !issues.is_empty() {
        return Err(CliError::Config(issues));
    }
    Ok(LoadedConfig {
        scenario: scenario.expect("scenario present when no issues"),
        output,
        csv,
        json: json_fmt,
        raw,
        resolved,
    })
}

enum PendingValue {
    Quantity { value: f64, unit: Option<String> },
    Done(Resolved),
}

fn parse_param(spec: &ParamSpec, value: &Value, issues: &mut ConfigIssues) -> Option<PendingValue> {
    let key = spec.key;
    let type_error = |issues: &mut ConfigIssues| {
        issues.details.push(format!("parameters.{key}: expected {}", spec.kind.shape()));
        None
    };
    match spec.kind {
        Kind::Quantity(_) => match value {
            Value::Number(n) => Some(PendingValue::Quantity {
                value: n.as_f64()?,
                unit: None,
            }),
            Value::Object(m) => {
                let mut ok = true;
                for k in m.keys() {
                    if k != "value" && k != "unit" {
                        issues.unknown_keys.push(format!("parameters.{key}.{k}"));
                        ok = false;
                    }
                }
                let v = m.get("value").and_then(Value::as_f64);
                let u = m.get("unit").and_then(Value::as_str);
                if v.is_none() || u.is_none() {
                    issues.details.push(format!(
                        "parameters.{key}: quantity object needs a numeric \"value\" and a string \"unit\""
                    ));
                    return None;
                }
                if !ok {
                    return None;
                }
                Some(PendingValue::Quantity { value: v.unwrap(), unit: Some(u.unwrap().to_string()) })
            }
            _ => type_error(issues),
        },
        Kind::Int => match value.as_u64() {
            Some(n) => Some(PendingValue::Done(Resolved::Int(n))),
            None => type_error(issues),
        },
        Kind::Text(options) => match value.as_str() {
            Some(s) if options.contains(&s) => {
                Some(PendingValue::Done(Resolved::Text(s.to_string())))
            }
            _ => type_error(issues),
        },
        Kind::Floats => match value.as_array() {
            Some(entries) => {
                let parsed: Option<Vec<f64>> = entries.iter().map(Value::as_f64).collect();
                match parsed {
                    Some(v) => Some(PendingValue::Done(Resolved::Nums(v))),
                    None => type_error(issues),
                }
            }
            None => type_error(issues),
        },
        Kind::Ints => match value.as_array() {
            Some(entries) => {
                let parsed: Option<Vec<u32>> = entries
                    .iter()
                    .map(|e| e.as_u64().and_then(|n| u32::try_from(n).ok()))
                    .collect();
                match parsed {
                    Some(v) => Some(PendingValue::Done(Resolved::Ints(v))),
                    None => type_error(issues),
                }
            }
            None => type_error(issues),
        },
        Kind::Grid => match value.as_object() {
            Some(m) => {
                let mut ok = true;
                for k in m.keys() {
                    if !matches!(k.as_str(), "min" | "max" | "count") {
                        issues.unknown_keys.push(format!("parameters.{key}.{k}"));
                        ok = false;
                    }
                }
                let min = m.get("min").and_then(Value::as_f64);
                let max = m.get("max").and_then(Value::as_f64);
                let count = m.get("count").and_then(Value::as_u64);
                match (min, max, count) {
                    (Some(min), Some(max), Some(count)) if ok => {
                        if count == 0 || max < min {
                            issues.details.push(format!(
                                "parameters.{key}: need count >= 1 and max >= min"
                            ));
                            None
                        } else {
                            Some(PendingValue::Done(Resolved::Grid { min, max, count }))
                        }
                    }
                    _ => {
                        if ok {
                            issues.details.push(format!(
                                "parameters.{key}: grid needs numeric \"min\", \"max\" and integer \"count\""
                            ));
                        }
                        None
                    }
                }
            }
            None => type_error(issues),
        },
    }
}
