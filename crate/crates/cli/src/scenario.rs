//! Scenario files: a sectioned `key = value` grammar.
//!
//! ```text
//! # comment
//! [scenario]
//! kind = qubit-closed-form
//!
//! [qubit]
//! omega = (0, 0, 6)
//! g = (4, 0, 0)
//! xi = (0, 0, 1)
//!
//! [integrator]
//! t_end = 10
//! ```
//!
//! Values are reals, 3-vectors `(a, b, c)` or strings (quoted, or a bare
//! word that is not a number). Which sections and keys are allowed depends on
//! the scenario kind; see [`ScenarioKind::sections`].

use std::collections::BTreeMap;
use std::fmt;

use qdsim_core::Vec3;

use crate::error::ScenarioError;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Real(f64),
    Vector(Vec3),
    Text(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // `{:?}` is the shortest representation that parses back exactly.
            Value::Real(x) => write!(f, "{x:?}"),
            Value::Vector(v) => write!(f, "({:?}, {:?}, {:?})", v.x, v.y, v.z),
            Value::Text(s) => write!(f, "\"{s}\""),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScenarioKind {
    QubitClosedForm,
    GkslOde,
    SingleLindblad,
    JaynesCummings,
    Bmt,
    Neutrino,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Ty {
    Real,
    Positive,
    NonNegative,
    Integer,
    Vector,
    /// 3-vector of norm at most 1.
    Bloch,
    Text,
    Choice(&'static [&'static str]),
}

#[derive(Debug, Clone, Copy)]
struct KeySpec {
    name: &'static str,
    ty: Ty,
    required: bool,
}

const fn req(name: &'static str, ty: Ty) -> KeySpec {
    KeySpec { name, ty, required: true }
}

const fn opt(name: &'static str, ty: Ty) -> KeySpec {
    KeySpec { name, ty, required: false }
}

const QUBIT_CLOSED: &[KeySpec] = &[req("omega", Ty::Vector), req("g", Ty::Vector), req("xi", Ty::Bloch)];
const QUBIT_ODE: &[KeySpec] = &[
    req("omega", Ty::Vector),
    req("g", Ty::Vector),
    req("xi", Ty::Bloch),
    opt("morse_q", Ty::Positive),
    opt("morse_nu", Ty::Positive),
    opt("mean_from", Ty::NonNegative),
    opt("mean_to", Ty::NonNegative),
];
const LINDBLAD_ODE: &[KeySpec] = &[opt("l_re", Ty::Vector), opt("l_im", Ty::Vector)];
const LINDBLAD_SINGLE: &[KeySpec] = &[
    opt("kappa", Ty::Real),
    req("g", Ty::Real),
    req("omega", Ty::Real),
    req("l", Ty::Real),
    req("xi", Ty::Bloch),
];
const JC: &[KeySpec] = &[
    req("omega_f", Ty::Real),
    req("omega_a", Ty::Real),
    req("g", Ty::Real),
    opt("n_max", Ty::Integer),
    opt("block", Ty::Integer),
    req("xi", Ty::Bloch),
];
const BMT: &[KeySpec] = &[
    req("e_field", Ty::Vector),
    req("b_field", Ty::Vector),
    opt("charge", Ty::Real),
    opt("mass", Ty::Positive),
    opt("c", Ty::Positive),
    opt("p0", Ty::Vector),
    req("xi", Ty::Bloch),
];
const NEUTRINO: &[KeySpec] = &[
    req("mode", Ty::Choice(&["msw", "damping"])),
    opt("energy_mev", Ty::Positive),
    opt("theta12", Ty::Real),
    opt("dm2", Ty::Positive),
    opt("eps", Ty::Positive),
    opt("r_sun", Ty::Positive),
    opt("potential_scale", Ty::Positive),
    opt("damping_direction", Ty::Vector),
];
const INTEGRATOR: &[KeySpec] = &[req("t_end", Ty::NonNegative), opt("step", Ty::Positive), opt("stride", Ty::Integer)];
const OUTPUT: &[KeySpec] = &[
    opt("csv", Ty::Text),
    opt("svg", Ty::Text),
    opt("observables", Ty::Text),
    opt("t_axis", Ty::Choice(&["linear", "log"])),
    opt("title", Ty::Text),
];

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 6] = [
        ScenarioKind::QubitClosedForm,
        ScenarioKind::GkslOde,
        ScenarioKind::SingleLindblad,
        ScenarioKind::JaynesCummings,
        ScenarioKind::Bmt,
        ScenarioKind::Neutrino,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::QubitClosedForm => "qubit-closed-form",
            ScenarioKind::GkslOde => "gksl-ode",
            ScenarioKind::SingleLindblad => "single-lindblad",
            ScenarioKind::JaynesCummings => "jaynes-cummings",
            ScenarioKind::Bmt => "bmt",
            ScenarioKind::Neutrino => "neutrino",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    fn schema(self) -> &'static [(&'static str, &'static [KeySpec])] {
        match self {
            ScenarioKind::QubitClosedForm => &[("qubit", QUBIT_CLOSED)],
            ScenarioKind::GkslOde => &[("qubit", QUBIT_ODE), ("lindblad", LINDBLAD_ODE)],
            ScenarioKind::SingleLindblad => &[("lindblad", LINDBLAD_SINGLE)],
            ScenarioKind::JaynesCummings => &[("jc", JC)],
            ScenarioKind::Bmt => &[("bmt", BMT)],
            ScenarioKind::Neutrino => &[("neutrino", NEUTRINO)],
        }
    }

    /// Kind-specific sections, in the order they are written.
    pub fn sections(self) -> Vec<&'static str> {
        self.schema().iter().map(|(s, _)| *s).collect()
    }

    /// Observables written when `[output] observables` is not given.
    pub fn default_observables(self) -> &'static [&'static str] {
        match self {
            ScenarioKind::QubitClosedForm => &["n1", "n2", "n3", "p_plus", "p_minus"],
            ScenarioKind::GkslOde => &["n1", "n2", "n3", "purity"],
            ScenarioKind::SingleLindblad => &["n1", "n2", "n3", "entropy"],
            // Block weights are appended at run time.
            ScenarioKind::JaynesCummings => &["energy"],
            ScenarioKind::Bmt => &["xi1", "xi2", "xi3", "pp_drift", "pw_drift"],
            ScenarioKind::Neutrino => &["p_ee"],
        }
    }

    fn fixed_observables(self) -> &'static [&'static str] {
        match self {
            ScenarioKind::QubitClosedForm => &["n1", "n2", "n3", "p_plus", "p_minus", "p_rabi", "purity"],
            ScenarioKind::GkslOde => &["n1", "n2", "n3", "purity", "entropy", "trace_error"],
            ScenarioKind::SingleLindblad => &["n1", "n2", "n3", "purity", "entropy"],
            ScenarioKind::JaynesCummings => &["energy"],
            ScenarioKind::Bmt => &[
                "xi1", "xi2", "xi3", "p1", "p2", "p3", "lab_time", "pp_drift", "pw_drift", "ww_drift",
            ],
            ScenarioKind::Neutrino => &["p_ee", "norm_error"],
        }
    }

    /// Whether `name` is an observable of this kind. Jaynes–Cummings block
    /// weights are `lambda_<n>`; their range is checked against `n_max` later.
    pub fn has_observable(self, name: &str) -> bool {
        if self.fixed_observables().contains(&name) {
            return true;
        }
        self == ScenarioKind::JaynesCummings
            && name.strip_prefix("lambda_").is_some_and(|n| n.parse::<usize>().is_ok())
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorSpec {
    /// RK4 step, or sample spacing for closed-form kinds; `None` picks a
    /// per-kind default.
    pub step: Option<f64>,
    pub t_end: f64,
    pub stride: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputSpec {
    pub csv: Option<String>,
    pub svg: Option<String>,
    /// Empty selects [`ScenarioKind::default_observables`].
    pub observables: Vec<String>,
    pub log_t: bool,
    pub title: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    /// Kind-specific sections: section → key → value.
    pub params: BTreeMap<String, BTreeMap<String, Value>>,
    pub integrator: IntegratorSpec,
    pub output: OutputSpec,
}

impl Scenario {
    pub fn get(&self, section: &str, key: &str) -> Option<&Value> {
        self.params.get(section)?.get(key)
    }

    pub fn real(&self, section: &str, key: &str) -> Option<f64> {
        match self.get(section, key)? {
            Value::Real(x) => Some(*x),
            _ => None,
        }
    }

    pub fn vector(&self, section: &str, key: &str) -> Option<Vec3> {
        match self.get(section, key)? {
            Value::Vector(v) => Some(*v),
            _ => None,
        }
    }

    pub fn text(&self, section: &str, key: &str) -> Option<&str> {
        match self.get(section, key)? {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    /// Observables to emit, defaults resolved.
    pub fn observables(&self) -> Vec<String> {
        if self.output.observables.is_empty() {
            self.kind.default_observables().iter().map(|s| s.to_string()).collect()
        } else {
            self.output.observables.clone()
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[scenario]\nkind = {}", self.kind)?;
        for (section, keys) in &self.params {
            writeln!(f, "\n[{section}]")?;
            for (k, v) in keys {
                writeln!(f, "{k} = {v}")?;
            }
        }
        let it = &self.integrator;
        writeln!(f, "\n[integrator]\nt_end = {}", Value::Real(it.t_end))?;
        if let Some(step) = it.step {
            writeln!(f, "step = {}", Value::Real(step))?;
        }
        writeln!(f, "stride = {}", it.stride)?;
        let out = &self.output;
        writeln!(f, "\n[output]")?;
        if let Some(csv) = &out.csv {
            writeln!(f, "csv = {}", Value::Text(csv.clone()))?;
        }
        if let Some(svg) = &out.svg {
            writeln!(f, "svg = {}", Value::Text(svg.clone()))?;
        }
        if !out.observables.is_empty() {
            writeln!(f, "observables = \"{}\"", out.observables.join(", "))?;
        }
        writeln!(f, "t_axis = {}", if out.log_t { "log" } else { "linear" })?;
        if let Some(title) = &out.title {
            writeln!(f, "title = {}", Value::Text(title.clone()))?;
        }
        Ok(())
    }
}

/// Writes a scenario in the file grammar; [`parse_scenario`] reads it back
/// unchanged.
pub fn serialize_scenario(s: &Scenario) -> String {
    s.to_string()
}

struct Entry {
    line: usize,
    value: Value,
}

struct Section {
    line: usize,
    entries: BTreeMap<String, Entry>,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Drops a `#` comment that is not inside a quoted string.
fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, ch) in line.char_indices() {
        match ch {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    // Rust accepts "inf"/"nan" spellings; scenario values must be finite.
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}

fn is_word(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.' | '/'))
}

/// Parses a value starting at 1-based column `col`.
fn parse_value(raw: &str, line: usize, col: usize) -> Result<Value, ScenarioError> {
    if let Some(rest) = raw.strip_prefix('(') {
        let inner = rest
            .strip_suffix(')')
            .ok_or_else(|| syntax(line, col + raw.chars().count(), "expected `)` closing the vector"))?;
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 3 {
            return Err(syntax(line, col, format!("a vector has 3 components, found {}", parts.len())));
        }
        let mut v = [0.0; 3];
        let mut offset = col + 1;
        for (k, part) in parts.iter().enumerate() {
            let lead = part.chars().take_while(|c| c.is_whitespace()).count();
            v[k] = parse_real(part).ok_or_else(|| {
                syntax(line, offset + lead, format!("`{}` is not a finite real", part.trim()))
            })?;
            offset += part.chars().count() + 1;
        }
        return Ok(Value::Vector(Vec3::new(v[0], v[1], v[2])));
    }
    if let Some(rest) = raw.strip_prefix('"') {
        let end = rest
            .find('"')
            .ok_or_else(|| syntax(line, col, "unterminated string"))?;
        if end + 1 != rest.len() {
            return Err(syntax(line, col + end + 2, "unexpected text after closing quote"));
        }
        return Ok(Value::Text(rest[..end].to_string()));
    }
    if let Some(x) = parse_real(raw) {
        return Ok(Value::Real(x));
    }
    if is_word(raw) {
        return Ok(Value::Text(raw.to_string()));
    }
    Err(syntax(line, col, format!("cannot read value `{raw}`")))
}

fn lex(text: &str) -> Result<Vec<(String, Section)>, ScenarioError> {
    let mut sections: Vec<(String, Section)> = Vec::new();
    for (idx, full) in text.lines().enumerate() {
        let line = idx + 1;
        let content = strip_comment(full);
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.chars().take_while(|c| c.is_whitespace()).count() + 1;
        if let Some(rest) = trimmed.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| syntax(line, indent + trimmed.chars().count(), "expected `]`"))?
                .trim();
            if !is_word(name) {
                return Err(syntax(line, indent + 1, format!("bad section name `{name}`")));
            }
            if sections.iter().any(|(n, _)| n == name) {
                return Err(ScenarioError::Duplicate {
                    line,
                    what: "section",
                    name: name.to_string(),
                });
            }
            sections.push((
                name.to_string(),
                Section {
                    line,
                    entries: BTreeMap::new(),
                },
            ));
            continue;
        }
        let eq = trimmed
            .find('=')
            .ok_or_else(|| syntax(line, indent, "expected `key = value` or `[section]`"))?;
        let key = trimmed[..eq].trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(syntax(line, indent, format!("bad key `{key}`")));
        }
        let after = &trimmed[eq + 1..];
        let raw = after.trim();
        if raw.is_empty() {
            return Err(syntax(line, indent + trimmed.chars().count(), "missing value"));
        }
        let value_col =
            indent + trimmed[..eq + 1].chars().count() + after.chars().take_while(|c| c.is_whitespace()).count();
        let value = parse_value(raw, line, value_col)?;
        let (_, section) = sections
            .last_mut()
            .ok_or_else(|| syntax(line, indent, "key outside of any section"))?;
        if section.entries.contains_key(key) {
            return Err(ScenarioError::Duplicate {
                line,
                what: "key",
                name: key.to_string(),
            });
        }
        section.entries.insert(key.to_string(), Entry { line, value });
    }
    Ok(sections)
}

fn check_type(key: &str, entry: &Entry, ty: Ty) -> Result<(), ScenarioError> {
    let line = entry.line;
    let type_err = |expected| ScenarioError::Type {
        line,
        key: key.to_string(),
        expected,
    };
    let domain = |message: String| ScenarioError::Domain {
        line: Some(line),
        key: key.to_string(),
        message,
    };
    match (ty, &entry.value) {
        (Ty::Real, Value::Real(_)) => Ok(()),
        (Ty::Positive, Value::Real(x)) if *x > 0.0 => Ok(()),
        (Ty::Positive, Value::Real(x)) => Err(domain(format!("must be positive, got {x}"))),
        (Ty::NonNegative, Value::Real(x)) if *x >= 0.0 => Ok(()),
        (Ty::NonNegative, Value::Real(x)) => Err(domain(format!("must be non-negative, got {x}"))),
        (Ty::Integer, Value::Real(x)) if *x >= 0.0 && x.fract() == 0.0 && *x < 1e15 => Ok(()),
        (Ty::Integer, Value::Real(x)) => Err(domain(format!("must be a non-negative integer, got {x}"))),
        (Ty::Real | Ty::Positive | Ty::NonNegative, _) => Err(type_err("a real number")),
        (Ty::Integer, _) => Err(type_err("an integer")),
        (Ty::Vector, Value::Vector(_)) => Ok(()),
        (Ty::Bloch, Value::Vector(v)) if v.norm() <= 1.0 + 1e-12 => Ok(()),
        (Ty::Bloch, Value::Vector(v)) => Err(domain(format!("Bloch vector norm {} exceeds 1", v.norm()))),
        (Ty::Vector | Ty::Bloch, _) => Err(type_err("a vector `(a, b, c)`")),
        (Ty::Text, Value::Text(_)) => Ok(()),
        (Ty::Text, _) => Err(type_err("a string")),
        (Ty::Choice(options), Value::Text(s)) if options.contains(&s.as_str()) => Ok(()),
        (Ty::Choice(options), Value::Text(s)) => Err(domain(format!("`{s}` is not one of {options:?}"))),
        (Ty::Choice(_), _) => Err(type_err("one of the listed words")),
    }
}

/// Line of each key in a section.
type KeyLines = BTreeMap<String, usize>;

/// Checks every entry of `section` against `specs`; returns the typed map.
fn validate_section(
    name: &str,
    section: Section,
    specs: &[KeySpec],
) -> Result<(BTreeMap<String, Value>, KeyLines), ScenarioError> {
    let mut values = BTreeMap::new();
    let mut lines = BTreeMap::new();
    for (key, entry) in section.entries {
        let spec = specs.iter().find(|s| s.name == key).ok_or_else(|| ScenarioError::UnknownKey {
            line: entry.line,
            section: name.to_string(),
            key: key.clone(),
        })?;
        check_type(&key, &entry, spec.ty)?;
        lines.insert(key.clone(), entry.line);
        values.insert(key, entry.value);
    }
    for spec in specs.iter().filter(|s| s.required) {
        if !values.contains_key(spec.name) {
            return Err(ScenarioError::MissingKey {
                section: name.to_string(),
                key: spec.name.to_string(),
            });
        }
    }
    Ok((values, lines))
}

fn empty_section() -> Section {
    Section {
        line: 0,
        entries: BTreeMap::new(),
    }
}

/// Parses and validates a scenario file.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut sections = lex(text)?;
    let take = |sections: &mut Vec<(String, Section)>, name: &str| {
        sections.iter().position(|(n, _)| n == name).map(|i| sections.remove(i).1)
    };

    let header = take(&mut sections, "scenario").ok_or_else(|| ScenarioError::MissingKey {
        section: "scenario".into(),
        key: "kind".into(),
    })?;
    let kind_entry_line = header.entries.get("kind").map(|e| e.line);
    let (header, _) = validate_section("scenario", header, &[req("kind", Ty::Text)])?;
    let kind_name = match &header["kind"] {
        Value::Text(s) => s.clone(),
        _ => unreachable!("validated as text"),
    };
    let kind = ScenarioKind::from_name(&kind_name).ok_or_else(|| ScenarioError::Domain {
        line: kind_entry_line,
        key: "kind".into(),
        message: format!(
            "unknown kind `{kind_name}` (expected one of {})",
            ScenarioKind::ALL.map(|k| k.name()).join(", ")
        ),
    })?;

    let mut params = BTreeMap::new();
    let mut key_lines = BTreeMap::new();
    for (name, specs) in kind.schema() {
        match take(&mut sections, name) {
            Some(section) => {
                let (values, lines) = validate_section(name, section, specs)?;
                key_lines.insert(name.to_string(), lines);
                params.insert(name.to_string(), values);
            }
            None if specs.iter().any(|s| s.required) => {
                let key = specs.iter().find(|s| s.required).map(|s| s.name).unwrap_or_default();
                return Err(ScenarioError::MissingKey {
                    section: name.to_string(),
                    key: key.to_string(),
                });
            }
            None => {}
        }
    }

    let integrator_section = take(&mut sections, "integrator").ok_or_else(|| ScenarioError::MissingKey {
        section: "integrator".into(),
        key: "t_end".into(),
    })?;
    let (integ, integ_lines) = validate_section("integrator", integrator_section, INTEGRATOR)?;
    let output_section = take(&mut sections, "output").unwrap_or_else(empty_section);
    let (out, out_lines) = validate_section("output", output_section, OUTPUT)?;

    if let Some((name, section)) = sections.into_iter().next() {
        let allowed = kind.sections().join("], [");
        return Err(ScenarioError::UnknownSection {
            line: section.line,
            section: name,
            hint: format!(" (kind {kind} uses [scenario], [{allowed}], [integrator], [output])"),
        });
    }

    let real = |m: &BTreeMap<String, Value>, k: &str| match m.get(k) {
        Some(Value::Real(x)) => Some(*x),
        _ => None,
    };
    let text = |m: &BTreeMap<String, Value>, k: &str| match m.get(k) {
        Some(Value::Text(s)) => Some(s.clone()),
        _ => None,
    };
    let stride = real(&integ, "stride").unwrap_or(1.0);
    if stride < 1.0 {
        return Err(ScenarioError::Domain {
            line: integ_lines.get("stride").copied(),
            key: "stride".into(),
            message: "must be at least 1".into(),
        });
    }
    let integrator = IntegratorSpec {
        step: real(&integ, "step"),
        t_end: real(&integ, "t_end").expect("required key"),
        stride: stride as usize,
    };

    let observables: Vec<String> = text(&out, "observables")
        .map(|s| s.split(',').map(|o| o.trim().to_string()).filter(|o| !o.is_empty()).collect())
        .unwrap_or_default();
    for o in &observables {
        if !kind.has_observable(o) {
            return Err(ScenarioError::Domain {
                line: out_lines.get("observables").copied(),
                key: "observables".into(),
                message: format!("`{o}` is not an observable of kind {kind}"),
            });
        }
    }
    let output = OutputSpec {
        csv: text(&out, "csv"),
        svg: text(&out, "svg"),
        observables,
        log_t: text(&out, "t_axis").as_deref() == Some("log"),
        title: text(&out, "title"),
    };

    let scenario = Scenario {
        kind,
        params,
        integrator,
        output,
    };
    check_kind_constraints(&scenario, &key_lines)?;
    Ok(scenario)
}

/// Cross-key constraints that the per-key types cannot express.
fn check_kind_constraints(
    s: &Scenario,
    lines: &BTreeMap<String, BTreeMap<String, usize>>,
) -> Result<(), ScenarioError> {
    let domain = |section: &str, key: &str, message: String| ScenarioError::Domain {
        line: lines.get(section).and_then(|m| m.get(key)).copied(),
        key: key.to_string(),
        message,
    };
    match s.kind {
        ScenarioKind::GkslOde => {
            let q = s.real("qubit", "morse_q");
            let nu = s.real("qubit", "morse_nu");
            if q.is_some() != nu.is_some() {
                let key = if q.is_some() { "morse_q" } else { "morse_nu" };
                return Err(domain("qubit", key, "morse_q and morse_nu must be given together".into()));
            }
            if q.is_some() && s.vector("qubit", "g").is_some_and(|g| g.norm() == 0.0) {
                return Err(domain("qubit", "g", "a Morse profile needs a nonzero direction g".into()));
            }
            match (s.real("qubit", "mean_from"), s.real("qubit", "mean_to")) {
                (None, None) => {}
                (Some(a), Some(b)) if a < b => {}
                (Some(_), Some(_)) => {
                    return Err(domain("qubit", "mean_to", "must exceed mean_from".into()));
                }
                _ => return Err(domain("qubit", "mean_from", "mean_from and mean_to go together".into())),
            }
        }
        ScenarioKind::JaynesCummings => {
            let n_max = s.real("jc", "n_max").unwrap_or(16.0);
            if n_max < 1.0 {
                return Err(domain("jc", "n_max", "must be at least 1".into()));
            }
            if let Some(b) = s.real("jc", "block") {
                if b > n_max {
                    return Err(domain("jc", "block", format!("block {b} exceeds n_max = {n_max}")));
                }
            }
            for o in &s.output.observables {
                if let Some(n) = o.strip_prefix("lambda_").and_then(|n| n.parse::<f64>().ok()) {
                    if n > n_max {
                        return Err(ScenarioError::Domain {
                            line: None,
                            key: "observables".into(),
                            message: format!("`{o}` exceeds n_max = {n_max}"),
                        });
                    }
                }
            }
        }
        ScenarioKind::Neutrino if s.vector("neutrino", "damping_direction").is_some_and(|d| d.norm() == 0.0) => {
            return Err(domain("neutrino", "damping_direction", "must be nonzero".into()));
        }
        _ => {}
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
[scenario]
kind = qubit-closed-form

[qubit]
omega = (0, 0, 6)
g = (4, 0, 0)   # orthogonal
xi = (0, 0, 1)

[integrator]
t_end = 10
";

    #[test]
    fn test_minimal_qubit_scenario() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(s.kind, ScenarioKind::QubitClosedForm);
        assert_eq!(s.vector("qubit", "g"), Some(Vec3::new(4.0, 0.0, 0.0)));
        assert_eq!(s.integrator.t_end, 10.0);
        assert_eq!(s.integrator.stride, 1);
        assert_eq!(s.observables(), ["n1", "n2", "n3", "p_plus", "p_minus"]);
    }

    #[test]
    fn test_misspelled_key_names_line() {
        let text = MINIMAL.replace("omega =", "omge =");
        let err = parse_scenario(&text).unwrap_err();
        assert_eq!(err.code(), "unknown-key");
        assert_eq!(err.line(), Some(5));
    }

    #[test]
    fn test_bloch_norm_domain_error() {
        let text = MINIMAL.replace("xi = (0, 0, 1)", "xi = (0, 0, 1.5)");
        let err = parse_scenario(&text).unwrap_err();
        assert_eq!(err.code(), "domain");
        assert_eq!(err.line(), Some(7));
    }

    #[test]
    fn test_syntax_errors_carry_columns() {
        let err = parse_scenario("[scenario]\nkind qubit").unwrap_err();
        assert_eq!(err.code(), "syntax");
        let err = parse_scenario("[scenario]\nkind = x\n[qubit]\nomega = (1, 2)\n").unwrap_err();
        assert!(matches!(err, ScenarioError::Syntax { line: 4, column: 9, .. }), "{err}");
        let err = parse_scenario("[scenario]\nkind = x\n[qubit]\nomega = (1, zz, 3)\n").unwrap_err();
        assert!(matches!(err, ScenarioError::Syntax { line: 4, column: 13, .. }), "{err}");
        let err = parse_scenario("x = 1").unwrap_err();
        assert!(matches!(err, ScenarioError::Syntax { line: 1, .. }));
    }

    #[test]
    fn test_missing_and_type_errors() {
        let text = MINIMAL.replace("xi = (0, 0, 1)\n", "");
        assert!(matches!(parse_scenario(&text), Err(ScenarioError::MissingKey { .. })));
        let text = MINIMAL.replace("t_end = 10", "t_end = (1, 2, 3)");
        assert_eq!(parse_scenario(&text).unwrap_err().code(), "type");
        let text = MINIMAL.replace("t_end = 10", "t_end = 10\nt_end = 11");
        assert_eq!(parse_scenario(&text).unwrap_err().code(), "duplicate");
        let text = format!("{MINIMAL}[jc]\ng = 1\n");
        assert_eq!(parse_scenario(&text).unwrap_err().code(), "unknown-section");
        let text = MINIMAL.replace("qubit-closed-form", "qubit-open-form");
        assert_eq!(parse_scenario(&text).unwrap_err().code(), "domain");
        let text = MINIMAL.replace("t_end = 10", "t_end = nan");
        assert_eq!(parse_scenario(&text).unwrap_err().code(), "type");
    }

    #[test]
    fn test_comments_and_quoted_hash() {
        let text = format!("{MINIMAL}[output]\ntitle = \"run #1\" # trailing\nobservables = \"n3, p_rabi\"\n");
        let s = parse_scenario(&text).unwrap();
        assert_eq!(s.output.title.as_deref(), Some("run #1"));
        assert_eq!(s.observables(), ["n3", "p_rabi"]);
        let bad = format!("{MINIMAL}[output]\nobservables = \"n3, energy\"\n");
        assert_eq!(parse_scenario(&bad).unwrap_err().code(), "domain");
    }

    #[test]
    fn test_round_trip_minimal() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(parse_scenario(&serialize_scenario(&s)).unwrap(), s);
    }
}
