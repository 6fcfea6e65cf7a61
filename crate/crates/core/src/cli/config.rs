//! Line-oriented run configuration: `key = value` pairs grouped under
//! `[section]` headers, `#` starts a comment.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::cases::{make_cavity, make_cylinder, make_uniform, CaseId, CaseManifest, GridSpec};
use crate::error::{Error, Result};
use crate::schemes::{parse_preset, Central, Dissipation};
use crate::solver::{Integrator, Reconstruction, TimeStepping};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldFormat {
    Csv,
    Plot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiagnosticToggles {
    pub checkerboard: bool,
    pub ind_p: bool,
    pub centerline: bool,
    pub divergence: bool,
}

impl Default for DiagnosticToggles {
    fn default() -> Self {
        Self {
            checkerboard: true,
            ind_p: true,
            centerline: false,
            divergence: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub manifest: CaseManifest,
    pub output_dir: PathBuf,
    pub formats: Vec<FieldFormat>,
    pub diagnostics: DiagnosticToggles,
    /// Mach numbers of a scaling study, strictly increasing.
    pub sweep: Option<Vec<f64>>,
}

impl RunConfig {
    pub fn for_manifest(manifest: CaseManifest) -> Self {
        let cavity = manifest.case == CaseId::Cavity;
        Self {
            manifest,
            output_dir: PathBuf::from("output"),
            formats: vec![FieldFormat::Csv],
            diagnostics: DiagnosticToggles {
                centerline: cavity,
                divergence: cavity,
                ..DiagnosticToggles::default()
            },
            sweep: None,
        }
    }
}

/// One `key = value` line.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub section: String,
    pub key: String,
    pub value: String,
    pub line: usize,
    /// Column of the value, 1-based.
    pub column: usize,
}

/// Parsed but not yet interpreted configuration.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConfigDocument {
    pub entries: Vec<Entry>,
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("case", &["name", "mach", "reynolds", "ni", "nj", "lx", "ly", "r_cyl", "r_far", "first_spacing"]),
    ("gas", &["mu", "pr"]),
    (
        "scheme",
        &[
            "scheme",
            "dissipation",
            "central",
            "k",
            "m_ref",
            "c2",
            "rho_star",
            "u_star",
            "dt_mim",
            "entropy_fix",
            "troe_original_energy",
            "jump_mach",
        ],
    ),
    ("solver", &["cfl", "time_stepping", "integrator", "reconstruction", "preconditioned"]),
    ("run", &["t_final", "tol", "max_iter", "output_every"]),
    ("output", &["dir", "format", "pbar"]),
    ("diagnostics", &["checkerboard", "ind_p", "centerline", "divergence"]),
    ("sweep", &["mach"]),
];

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

impl ConfigDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<Entry> = Vec::new();
        let mut section = String::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let body = raw.split('#').next().unwrap_or("");
            let indent = body.len() - body.trim_start().len();
            let trimmed = body.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| parse_err(line, indent + trimmed.len(), "missing ']' after section name"))?
                    .trim();
                if !SECTIONS.iter().any(|(s, _)| *s == name) {
                    return Err(parse_err(line, indent + 2, format!("unknown section [{name}]")));
                }
                section = name.to_string();
                continue;
            }
            let eq = body
                .find('=')
                .ok_or_else(|| parse_err(line, indent + 1, "expected 'key = value'"))?;
            let key = body[..eq].trim();
            let value_raw = &body[eq + 1..];
            let value = value_raw.trim();
            let column = eq + 2 + (value_raw.len() - value_raw.trim_start().len());
            if key.is_empty() {
                return Err(parse_err(line, indent + 1, "missing key before '='"));
            }
            if value.is_empty() {
                return Err(parse_err(line, column, format!("missing value for '{key}'")));
            }
            if section.is_empty() {
                return Err(parse_err(line, indent + 1, format!("key '{key}' outside any section")));
            }
            let known = SECTIONS.iter().find(|(s, _)| *s == section).map(|(_, k)| *k).unwrap_or(&[]);
            if !known.contains(&key) {
                return Err(parse_err(line, indent + 1, format!("unknown key '{key}' in [{section}]")));
            }
            if entries.iter().any(|e| e.section == section && e.key == key) {
                return Err(parse_err(line, indent + 1, format!("duplicate key '{key}' in [{section}]")));
            }
            entries.push(Entry {
                section: section.clone(),
                key: key.to_string(),
                value: value.to_string(),
                line,
                column,
            });
        }
        Ok(Self { entries })
    }

    /// Inserts or replaces a value, as a command-line override would.
    pub fn set(&mut self, section: &str, key: &str, value: &str) {
        if let Some(e) = self.entries.iter_mut().find(|e| e.section == section && e.key == key) {
            e.value = value.to_string();
        } else {
            self.entries.push(Entry {
                section: section.into(),
                key: key.into(),
                value: value.into(),
                line: 0,
                column: 0,
            });
        }
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.section == section && e.key == key)
    }
}

/// Typed access to one section, tracking the entries for error messages.
struct Section<'a> {
    name: &'a str,
    map: HashMap<&'a str, &'a Entry>,
}

impl<'a> Section<'a> {
    fn new(doc: &'a ConfigDocument, name: &'a str) -> Self {
        let map = doc
            .entries
            .iter()
            .filter(|e| e.section == name)
            .map(|e| (e.key.as_str(), e))
            .collect();
        Self { name, map }
    }

    fn semantic(&self, e: &Entry, what: &str) -> Error {
        let at = if e.line > 0 { format!(" (line {})", e.line) } else { String::new() };
        Error::Config(format!("[{}] {} = '{}': {what}{at}", self.name, e.key, e.value))
    }

    fn parsed<T: FromStr>(&self, key: &str, what: &str) -> Result<Option<T>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(e) => e.value.parse::<T>().map(Some).map_err(|_| self.semantic(e, what)),
        }
    }

    fn f64(&self, key: &str) -> Result<Option<f64>> {
        let v = self.parsed::<f64>(key, "expected a number")?;
        if let (Some(x), Some(e)) = (v, self.map.get(key)) {
            if !x.is_finite() {
                return Err(self.semantic(e, "expected a finite number"));
            }
        }
        Ok(v)
    }

    fn usize(&self, key: &str) -> Result<Option<usize>> {
        self.parsed(key, "expected a non-negative integer")
    }

    fn bool(&self, key: &str) -> Result<Option<bool>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(e) => match e.value.to_ascii_lowercase().as_str() {
                "true" | "yes" | "on" => Ok(Some(true)),
                "false" | "no" | "off" => Ok(Some(false)),
                _ => Err(self.semantic(e, "expected true or false")),
            },
        }
    }

    /// A number, or one of the words `none` / `auto` meaning absent.
    fn optional_f64(&self, key: &str) -> Result<Option<Option<f64>>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(e) if matches!(e.value.to_ascii_lowercase().as_str(), "none" | "auto") => Ok(Some(None)),
            Some(_) => Ok(Some(self.f64(key)?)),
        }
    }

    fn word<T>(&self, key: &str, parse: impl Fn(&str) -> Option<T>, what: &str) -> Result<Option<T>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(e) => parse(&e.value.to_ascii_lowercase()).map(Some).ok_or_else(|| self.semantic(e, what)),
        }
    }

    fn entry(&self, key: &str) -> Option<&Entry> {
        self.map.get(key).copied()
    }
}

fn time_stepping(s: &str) -> Option<TimeStepping> {
    match s {
        "global" => Some(TimeStepping::Global),
        "local" => Some(TimeStepping::Local),
        _ => None,
    }
}

fn integrator(s: &str) -> Option<Integrator> {
    match s {
        "forward-euler" | "euler" => Some(Integrator::ForwardEuler),
        "ssp3" | "rk3" => Some(Integrator::Ssp3),
        _ => None,
    }
}

fn reconstruction(s: &str) -> Option<Reconstruction> {
    match s {
        "first-order" => Some(Reconstruction::FirstOrder),
        "muscl" => Some(Reconstruction::Muscl),
        _ => None,
    }
}

pub fn time_stepping_name(t: TimeStepping) -> &'static str {
    match t {
        TimeStepping::Global => "global",
        TimeStepping::Local => "local",
    }
}

pub fn integrator_name(i: Integrator) -> &'static str {
    match i {
        Integrator::ForwardEuler => "forward-euler",
        Integrator::Ssp3 => "ssp3",
    }
}

pub fn reconstruction_name(r: Reconstruction) -> &'static str {
    match r {
        Reconstruction::FirstOrder => "first-order",
        Reconstruction::Muscl => "muscl",
    }
}

/// Parses configuration text into a validated run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    build_config(&ConfigDocument::parse(text)?)
}

/// Interprets a document: the case builder supplies defaults, then the
/// gas, scheme, solver and run sections override them in that order.
pub fn build_config(doc: &ConfigDocument) -> Result<RunConfig> {
    let case = Section::new(doc, "case");
    let name = case
        .entry("name")
        .ok_or_else(|| Error::Config("[case] name is required".into()))?;
    let id: CaseId = name.value.parse().map_err(|_| case.semantic(name, "unknown case"))?;
    let mut m = CaseManifest::preset(id);

    let mach = case.f64("mach")?;
    let reynolds = case.f64("reynolds")?;
    let ni = case.usize("ni")?;
    let nj = case.usize("nj")?;
    let (dni, dnj) = m.grid.dims();
    let (ni, nj) = (ni.unwrap_or(dni), nj.unwrap_or(dnj));
    let wrap = |e: Error, key: &str| match case.entry(key) {
        Some(en) => case.semantic(en, &e.to_string()),
        None => e,
    };
    m = match id {
        CaseId::Sod => {
            if let Some(en) = case.entry("mach").or(case.entry("reynolds")) {
                return Err(case.semantic(en, "the shock tube takes no Mach or Reynolds number"));
            }
            if let GridSpec::Cartesian { ni: n, nj: k, .. } = &mut m.grid {
                *n = ni;
                *k = nj;
            }
            m
        }
        CaseId::Cavity => make_cavity(mach.unwrap_or(m.mach), reynolds.unwrap_or(400.0), ni, nj)
            .map_err(|e| wrap(e, "mach"))?,
        CaseId::Cylinder => make_cylinder(mach.unwrap_or(m.mach), ni, nj).map_err(|e| wrap(e, "mach"))?,
        CaseId::Uniform => make_uniform(mach.unwrap_or(m.mach), ni, nj).map_err(|e| wrap(e, "mach"))?,
    };
    if id != CaseId::Cavity {
        if let Some(en) = case.entry("reynolds") {
            return Err(case.semantic(en, "only the cavity takes a Reynolds number"));
        }
    }
    match &mut m.grid {
        GridSpec::Cartesian { lx, ly, .. } => {
            for k in ["r_cyl", "r_far", "first_spacing"] {
                if let Some(en) = case.entry(k) {
                    return Err(case.semantic(en, "only the o-grid takes this key"));
                }
            }
            if let Some(v) = case.f64("lx")? {
                *lx = v;
            }
            if let Some(v) = case.f64("ly")? {
                *ly = v;
            }
        }
        GridSpec::OGrid {
            r_cyl,
            r_far,
            first_spacing,
            ..
        } => {
            for k in ["lx", "ly"] {
                if let Some(en) = case.entry(k) {
                    return Err(case.semantic(en, "only cartesian grids take this key"));
                }
            }
            if let Some(v) = case.f64("r_cyl")? {
                *r_cyl = v;
            }
            if let Some(v) = case.f64("r_far")? {
                *r_far = v;
            }
            if let Some(v) = case.f64("first_spacing")? {
                *first_spacing = v;
            }
        }
    }

    let gas = Section::new(doc, "gas");
    if let Some(v) = gas.f64("mu")? {
        m.gas.mu = v;
    }
    if let Some(v) = gas.f64("pr")? {
        m.gas.pr = v;
    }

    let sch = Section::new(doc, "scheme");
    let mut dissipation = m.scheme.dissipation;
    let mut central = m.scheme.central;
    if let Some(e) = sch.entry("scheme") {
        let (d, c) = parse_preset(&e.value).map_err(|err| sch.semantic(e, &err.to_string()))?;
        dissipation = d;
        central = c.unwrap_or(Central::PlainAverage);
    }
    if let Some(e) = sch.entry("dissipation") {
        dissipation = Dissipation::from_str(&e.value).map_err(|err| sch.semantic(e, &err.to_string()))?;
    }
    if let Some(e) = sch.entry("central") {
        central = Central::from_str(&e.value).map_err(|err| sch.semantic(e, &err.to_string()))?;
    }
    m = m.with_scheme(dissipation, central);
    let s = &mut m.scheme;
    if let Some(v) = sch.f64("k")? {
        s.k = v;
    }
    if let Some(v) = sch.f64("m_ref")? {
        s.m_ref = v;
    }
    if let Some(v) = sch.f64("c2")? {
        s.c2 = v;
    }
    if let Some(v) = sch.f64("rho_star")? {
        s.rho_star = v;
    }
    if let Some(v) = sch.f64("u_star")? {
        s.u_star = v;
    }
    if let Some(v) = sch.optional_f64("dt_mim")? {
        s.dt_mim = v;
    }
    if let Some(v) = sch.optional_f64("entropy_fix")? {
        s.entropy_fix = v;
    }
    if let Some(v) = sch.bool("troe_original_energy")? {
        s.troe_original_energy = v;
    }
    if let Some(v) = sch.bool("jump_mach")? {
        s.jump_mach = v;
    }

    let sol = Section::new(doc, "solver");
    let st = &mut m.settings;
    if let Some(v) = sol.f64("cfl")? {
        st.cfl = v;
    }
    if let Some(v) = sol.word("time_stepping", time_stepping, "expected global or local")? {
        st.time_stepping = v;
    }
    if let Some(v) = sol.word("integrator", integrator, "expected forward-euler or ssp3")? {
        st.integrator = v;
    }
    if let Some(v) = sol.word("reconstruction", reconstruction, "expected first-order or muscl")? {
        st.reconstruction = v;
    }
    if let Some(v) = sol.bool("preconditioned")? {
        st.preconditioned = v;
    }

    let run = Section::new(doc, "run");
    if let Some(v) = run.optional_f64("t_final")? {
        m.run.t_final = v;
    }
    if let Some(v) = run.f64("tol")? {
        m.run.tol = v;
    }
    if let Some(v) = run.usize("max_iter")? {
        m.run.max_iter = v;
    }
    if let Some(v) = run.usize("output_every")? {
        m.run.output_every = v;
    }

    let mut cfg = RunConfig::for_manifest(m);
    let out = Section::new(doc, "output");
    if let Some(e) = out.entry("dir") {
        cfg.output_dir = PathBuf::from(&e.value);
    }
    if let Some(e) = out.entry("format") {
        let mut formats = Vec::new();
        for w in e.value.split(',').map(|w| w.trim().to_ascii_lowercase()) {
            match w.as_str() {
                "csv" => formats.push(FieldFormat::Csv),
                "plot" => formats.push(FieldFormat::Plot),
                "none" => {}
                _ => return Err(out.semantic(e, "expected a list of csv, plot or none")),
            }
        }
        formats.dedup();
        cfg.formats = formats;
    }
    if let Some(v) = out.bool("pbar")? {
        cfg.manifest.pbar = v;
    }

    let diag = Section::new(doc, "diagnostics");
    let d = &mut cfg.diagnostics;
    for (key, slot) in [
        ("checkerboard", &mut d.checkerboard),
        ("ind_p", &mut d.ind_p),
        ("centerline", &mut d.centerline),
        ("divergence", &mut d.divergence),
    ] {
        if let Some(v) = diag.bool(key)? {
            *slot = v;
        }
    }

    let sweep = Section::new(doc, "sweep");
    if let Some(e) = sweep.entry("mach") {
        let mut list = Vec::new();
        for w in e.value.split(',') {
            let x: f64 = w.trim().parse().map_err(|_| sweep.semantic(e, "expected a comma-separated list of numbers"))?;
            list.push(x);
        }
        if list.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
            return Err(sweep.semantic(e, "sweep Mach numbers must lie in (0, 1)"));
        }
        if list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(sweep.semantic(e, "sweep Mach numbers must be strictly increasing"));
        }
        if id == CaseId::Sod {
            return Err(sweep.semantic(e, "the shock tube cannot be swept in Mach number"));
        }
        cfg.sweep = Some(list);
    }

    cfg.manifest.validate()?;
    Ok(cfg)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".into(), |x| format!("{x:?}"))
}

/// Writes every setting explicitly, so that parsing the text reproduces
/// the configuration bit for bit.
pub fn to_config_text(cfg: &RunConfig) -> String {
    let m = &cfg.manifest;
    let mut t = String::new();
    let (ni, nj) = m.grid.dims();
    let _ = writeln!(t, "[case]\nname = {}", m.case);
    if m.case != CaseId::Sod {
        let _ = writeln!(t, "mach = {:?}", m.mach);
    }
    if let Some(re) = m.reynolds {
        let _ = writeln!(t, "reynolds = {re:?}");
    }
    let _ = writeln!(t, "ni = {ni}\nnj = {nj}");
    match m.grid {
        GridSpec::Cartesian { lx, ly, .. } => {
            let _ = writeln!(t, "lx = {lx:?}\nly = {ly:?}");
        }
        GridSpec::OGrid {
            r_cyl,
            r_far,
            first_spacing,
            ..
        } => {
            let _ = writeln!(t, "r_cyl = {r_cyl:?}\nr_far = {r_far:?}\nfirst_spacing = {first_spacing:?}");
        }
    }
    let _ = writeln!(t, "\n[gas]\nmu = {:?}\npr = {:?}", m.gas.mu, m.gas.pr);
    let s = &m.scheme;
    let _ = writeln!(
        t,
        "\n[scheme]\ndissipation = {}\ncentral = {}\nk = {:?}\nm_ref = {:?}\nc2 = {:?}\nrho_star = {:?}\nu_star = {:?}\ndt_mim = {}\nentropy_fix = {}\ntroe_original_energy = {}\njump_mach = {}",
        s.dissipation,
        s.central,
        s.k,
        s.m_ref,
        s.c2,
        s.rho_star,
        s.u_star,
        opt(s.dt_mim),
        opt(s.entropy_fix),
        s.troe_original_energy,
        s.jump_mach
    );
    let st = &m.settings;
    let _ = writeln!(
        t,
        "\n[solver]\ncfl = {:?}\ntime_stepping = {}\nintegrator = {}\nreconstruction = {}\npreconditioned = {}",
        st.cfl,
        time_stepping_name(st.time_stepping),
        integrator_name(st.integrator),
        reconstruction_name(st.reconstruction),
        st.preconditioned
    );
    let _ = writeln!(
        t,
        "\n[run]\nt_final = {}\ntol = {:?}\nmax_iter = {}\noutput_every = {}",
        opt(m.run.t_final),
        m.run.tol,
        m.run.max_iter,
        m.run.output_every
    );
    let formats: Vec<&str> = cfg
        .formats
        .iter()
        .map(|f| match f {
            FieldFormat::Csv => "csv",
            FieldFormat::Plot => "plot",
        })
        .collect();
    let _ = writeln!(
        t,
        "\n[output]\ndir = {}\nformat = {}\npbar = {}",
        cfg.output_dir.display(),
        if formats.is_empty() { "none".to_string() } else { formats.join(",") },
        m.pbar
    );
    let d = &cfg.diagnostics;
    let _ = writeln!(
        t,
        "\n[diagnostics]\ncheckerboard = {}\nind_p = {}\ncenterline = {}\ndivergence = {}",
        d.checkerboard, d.ind_p, d.centerline, d.divergence
    );
    if let Some(list) = &cfg.sweep {
        let l: Vec<String> = list.iter().map(|x| format!("{x:?}")).collect();
        let _ = writeln!(t, "\n[sweep]\nmach = {}", l.join(", "));
    }
    t
}
