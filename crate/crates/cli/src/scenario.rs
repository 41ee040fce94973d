//! Scenario files.
//!
//! A scenario is a line-oriented `key = value` file split into sections;
//! `#` starts a comment. Parsing is strict: an unknown section or key, a
//! missing required key, a duplicate key or name, and a reference to a name
//! that has not been declared earlier in the file are all parse errors that
//! name the offending line.
//!
//! ```text
//! [scenario]          name, seed, budget                      (all optional)
//! [space NAME]        kind, class                             (NAME optional)
//! [homeo NAME]        family = F, space, <parameters of F>
//!                   | compose = a, b, ...                     (a ∘ b ∘ ...)
//!                   | inverse = a
//!                   | of = a, with power = n or sampled = resolution
//! [point NAME]        at = s, t                               (t may be inf)
//! [path NAME]         through = x, y, ..., windings = i:j, ...
//! [measure NAME]      kind = circle, space, circle
//!                   | kind = atoms, space, points, weights
//!                   | kind = empirical, homeo, start, length
//! [generators NAME]   use = a, b, ..., level
//! [analysis TYPE]     id, plus the keys of TYPE
//! ```
//!
//! Lists are comma separated. Numbers are exact literals: integers,
//! decimals, `p/q`, and expressions in one square root such as
//! `sqrt(2) - 1`. All literals of a scenario share a single radicand so that
//! exact maps can be composed. `space` may be omitted when the scenario
//! declares exactly one space. `list-families` prints the parameters of
//! every family and the keys of every analysis.

use std::collections::HashMap;
use std::str::FromStr;

use undistort::homeo::Family;
use undistort::measure::InvariantCircle;
use undistort::{Point, Space, SpaceKind, Surd};

use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

pub const DEFAULT_BUDGET: usize = 16_384;
pub const DEFAULT_GCOCYCLE_RANGE: usize = 5;
pub const DEFAULT_DEFECT_RANGE: usize = 16;

#[derive(Clone, Debug)]
pub struct Named<T> {
    pub name: String,
    pub line: usize,
    pub item: T,
}

#[derive(Clone, Debug)]
pub enum HomeoDef {
    Identity {
        space: String,
    },
    Family {
        space: String,
        family: Family,
    },
    Pl {
        space: String,
        knots: Vec<(Surd, Surd)>,
    },
    Compose(Vec<String>),
    Inverse(String),
    Power {
        of: String,
        n: i64,
    },
    Sampled {
        of: String,
        resolution: usize,
    },
}

#[derive(Clone, Debug)]
pub struct PathDef {
    pub through: Vec<String>,
    pub windings: Vec<[i64; 2]>,
}

#[derive(Clone, Debug)]
pub enum MeasureDef {
    Circle {
        space: String,
        circle: InvariantCircle,
    },
    Atoms {
        space: String,
        points: Vec<String>,
        weights: Vec<f64>,
    },
    Empirical {
        homeo: String,
        start: String,
        length: usize,
    },
}

#[derive(Clone, Debug)]
pub struct GeneratorDef {
    pub uses: Vec<String>,
    pub level: u32,
}

/// Where an undistortion certificate takes its seminorm constant from.
#[derive(Clone, Debug, PartialEq)]
pub enum Constant {
    PerUnit,
    Generators(String),
    Value(f64),
}

#[derive(Clone, Debug)]
pub enum Analysis {
    K {
        homeo: String,
        point: Option<String>,
        samples: usize,
        power: i64,
    },
    Seminorm {
        homeo: String,
        level: u32,
    },
    GCocycle {
        homeo: String,
        point: String,
        range: usize,
    },
    Rot {
        homeo: String,
        point: String,
        budget: Option<usize>,
    },
    Defect {
        homeo: String,
        x: String,
        y: String,
        range: usize,
    },
    CertifyRotation {
        homeo: String,
        x: String,
        y: String,
        budget: Option<usize>,
        constant: Constant,
    },
    CertifyFixed {
        homeo: String,
        x: String,
        y: String,
        path: Option<String>,
        constant: Constant,
    },
    Nielsen {
        homeo: String,
        mu: String,
        nu: String,
        constant: Constant,
    },
    Scc {
        homeo: String,
        circle: InvariantCircle,
        budget: Option<usize>,
    },
    Rationality {
        homeo: String,
        circles: [InvariantCircle; 2],
        budget: Option<usize>,
    },
    Ball {
        generators: String,
        radius: usize,
        cap: Option<usize>,
    },
    WordNorm {
        homeo: String,
        generators: String,
        radius: usize,
        cap: Option<usize>,
    },
    Tau {
        homeo: String,
        generators: String,
        radius: usize,
        cap: Option<usize>,
        certificates: Vec<String>,
    },
}

/// Analysis names with their keys, in the order `list-families` prints them.
pub const ANALYSES: [(&str, &str); 13] = [
    ("k", "homeo, point | samples, power = 1"),
    ("seminorm", "homeo, level = 8"),
    ("gcocycle", "homeo, point, range = 5"),
    ("rot", "homeo, point, budget"),
    ("defect", "homeo, x, y, range = 16"),
    (
        "certify-rotation",
        "homeo, x, y, budget, generators | constant",
    ),
    ("certify-fixed", "homeo, x, y, path, generators | constant"),
    ("nielsen", "homeo, mu, nu, generators | constant"),
    ("scc", "homeo, circle, budget"),
    ("rationality", "homeo, circles, budget"),
    ("ball", "generators, radius, cap"),
    ("wordnorm", "homeo, generators, radius, cap"),
    ("tau", "homeo, generators, radius, cap, certificates"),
];

impl Analysis {
    pub fn name(&self) -> &'static str {
        match self {
            Analysis::K { .. } => "k",
            Analysis::Seminorm { .. } => "seminorm",
            Analysis::GCocycle { .. } => "gcocycle",
            Analysis::Rot { .. } => "rot",
            Analysis::Defect { .. } => "defect",
            Analysis::CertifyRotation { .. } => "certify-rotation",
            Analysis::CertifyFixed { .. } => "certify-fixed",
            Analysis::Nielsen { .. } => "nielsen",
            Analysis::Scc { .. } => "scc",
            Analysis::Rationality { .. } => "rationality",
            Analysis::Ball { .. } => "ball",
            Analysis::WordNorm { .. } => "wordnorm",
            Analysis::Tau { .. } => "tau",
        }
    }

    pub fn produces_certificate(&self) -> bool {
        matches!(
            self,
            Analysis::CertifyRotation { .. }
                | Analysis::CertifyFixed { .. }
                | Analysis::Nielsen { .. }
        )
    }
}

#[derive(Clone, Debug)]
pub struct AnalysisSpec {
    pub id: Option<String>,
    pub line: usize,
    pub analysis: Analysis,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    pub budget: usize,
    pub spaces: Vec<Named<Space>>,
    pub homeos: Vec<Named<HomeoDef>>,
    pub points: Vec<Named<Point>>,
    pub paths: Vec<Named<PathDef>>,
    pub measures: Vec<Named<MeasureDef>>,
    pub generators: Vec<Named<GeneratorDef>>,
    pub analyses: Vec<AnalysisSpec>,
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let sections = split_sections(text)?;
    let mut b = Builder::default();
    for section in &sections {
        b.section(section)?;
    }
    b.finish()
}

struct Entry {
    key: String,
    value: String,
    line: usize,
}

struct Section {
    kind: String,
    name: Option<String>,
    line: usize,
    entries: Vec<Entry>,
}

const SECTIONS: [&str; 8] = [
    "scenario",
    "space",
    "homeo",
    "point",
    "path",
    "measure",
    "generators",
    "analysis",
];

fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
}

fn split_sections(text: &str) -> Result<Vec<Section>> {
    let mut out: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(inner) = content.strip_prefix('[') {
            let inner = inner
                .strip_suffix(']')
                .ok_or_else(|| CliError::parse(line, "unterminated section header"))?;
            let mut words = inner.split_whitespace();
            let kind = words
                .next()
                .ok_or_else(|| CliError::parse(line, "empty section header"))?;
            if !SECTIONS.contains(&kind) {
                return Err(CliError::parse(line, format!("unknown section '{kind}'")));
            }
            let name = words.next().map(str::to_string);
            if words.next().is_some() {
                return Err(CliError::parse(
                    line,
                    "a section header takes at most one name",
                ));
            }
            match (kind, &name) {
                ("scenario", Some(_)) => {
                    return Err(CliError::parse(line, "[scenario] takes no name"));
                }
                ("scenario" | "space", _) => {}
                (_, None) => {
                    return Err(CliError::parse(line, format!("[{kind}] needs a name")));
                }
                _ => {}
            }
            if let Some(n) = &name {
                if !valid_name(n) {
                    return Err(CliError::parse(line, format!("invalid name '{n}'")));
                }
            }
            out.push(Section {
                kind: kind.to_string(),
                name,
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| {
            CliError::parse(line, format!("expected 'key = value', got '{content}'"))
        })?;
        let (key, value) = (key.trim(), value.trim());
        if !valid_name(key) {
            return Err(CliError::parse(line, format!("invalid key '{key}'")));
        }
        let section = out
            .last_mut()
            .ok_or_else(|| CliError::parse(line, format!("key '{key}' outside any section")))?;
        if section.entries.iter().any(|e| e.key == key) {
            return Err(CliError::parse(line, format!("duplicate key '{key}'")));
        }
        if value.is_empty() {
            return Err(CliError::parse(line, format!("key '{key}' has no value")));
        }
        section.entries.push(Entry {
            key: key.to_string(),
            value: value.to_string(),
            line,
        });
    }
    Ok(out)
}

impl Section {
    fn header(&self) -> String {
        match &self.name {
            Some(n) => format!("[{} {}]", self.kind, n),
            None => format!("[{}]", self.kind),
        }
    }

    fn allow(&self, keys: &[&str]) -> Result<()> {
        for e in &self.entries {
            if !keys.contains(&e.key.as_str()) {
                return Err(CliError::parse(
                    e.line,
                    format!("unknown key '{}' in {}", e.key, self.header()),
                ));
            }
        }
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    fn req(&self, key: &str) -> Result<&Entry> {
        self.get(key).ok_or_else(|| {
            CliError::parse(
                self.line,
                format!("missing key '{key}' in {}", self.header()),
            )
        })
    }
}

fn list(e: &Entry) -> Result<Vec<&str>> {
    let items: Vec<&str> = e.value.split(',').map(str::trim).collect();
    if items.iter().any(|s| s.is_empty()) {
        return Err(CliError::parse(
            e.line,
            format!("empty item in list '{}'", e.key),
        ));
    }
    Ok(items)
}

fn integer<T: FromStr>(e: &Entry) -> Result<T> {
    e.value.parse().map_err(|_| {
        CliError::parse(
            e.line,
            format!("'{}' expects an integer, got '{}'", e.key, e.value),
        )
    })
}

fn circle(text: &str, line: usize) -> Result<InvariantCircle> {
    InvariantCircle::parse(text).map_err(|err| CliError::parse(line, err.to_string()))
}

#[derive(Default)]
struct Builder {
    radicand: Option<u64>,
    name: Option<String>,
    seed: Option<u64>,
    budget: Option<usize>,
    seen_scenario: bool,
    spaces: Vec<Named<Space>>,
    homeos: Vec<Named<HomeoDef>>,
    /// Homeos whose space was left implicit.
    implicit_space: Vec<usize>,
    points: Vec<Named<Point>>,
    paths: Vec<Named<PathDef>>,
    measures: Vec<Named<MeasureDef>>,
    implicit_measure_space: Vec<usize>,
    generators: Vec<Named<GeneratorDef>>,
    analyses: Vec<AnalysisSpec>,
    /// Analysis ids mapped to whether the analysis yields a certificate.
    ids: HashMap<String, bool>,
}

const IMPLICIT: &str = "";

impl Builder {
    fn surd(&mut self, text: &str, line: usize) -> Result<Surd> {
        let value = Surd::from_str(text)
            .map_err(|err| CliError::parse(line, format!("bad number '{text}': {err}")))?;
        let d = value.radicand();
        if d != 0 {
            match self.radicand {
                Some(prev) if prev != d => {
                    return Err(CliError::parse(
                        line,
                        format!("sqrt({d}) mixes with sqrt({prev}) used earlier in the scenario"),
                    ));
                }
                _ => self.radicand = Some(d),
            }
        }
        Ok(value)
    }

    fn real(&mut self, text: &str, line: usize) -> Result<f64> {
        Ok(self.surd(text, line)?.to_f64())
    }

    fn coordinate(&mut self, text: &str, line: usize) -> Result<f64> {
        match text {
            "inf" | "∞" => Ok(f64::INFINITY),
            _ => self.real(text, line),
        }
    }

    fn names<T>(items: &[Named<T>]) -> impl Iterator<Item = &str> {
        items.iter().map(|n| n.name.as_str())
    }

    fn declared(&self, kind: &str, name: &str) -> bool {
        match kind {
            "space" => Self::names(&self.spaces).any(|n| n == name),
            "homeo" => Self::names(&self.homeos).any(|n| n == name),
            "point" => Self::names(&self.points).any(|n| n == name),
            "path" => Self::names(&self.paths).any(|n| n == name),
            "measure" => Self::names(&self.measures).any(|n| n == name),
            "generators" => Self::names(&self.generators).any(|n| n == name),
            _ => false,
        }
    }

    fn resolve(&self, kind: &str, name: &str, line: usize) -> Result<String> {
        if self.declared(kind, name) {
            Ok(name.to_string())
        } else {
            Err(CliError::parse(
                line,
                format!("unresolved reference to {kind} '{name}' (declare it before use)"),
            ))
        }
    }

    fn reference(&self, s: &Section, kind: &str, key: &str) -> Result<String> {
        let e = s.req(key)?;
        self.resolve(kind, &e.value, e.line)
    }

    fn optional_reference(&self, s: &Section, kind: &str, key: &str) -> Result<Option<String>> {
        s.get(key)
            .map(|e| self.resolve(kind, &e.value, e.line))
            .transpose()
    }

    fn space_reference(&self, s: &Section) -> Result<String> {
        match s.get("space") {
            Some(e) => self.resolve("space", &e.value, e.line),
            None => Ok(IMPLICIT.to_string()),
        }
    }

    fn section(&mut self, s: &Section) -> Result<()> {
        if let Some(name) = &s.name {
            if s.kind != "analysis" && self.declared(&s.kind, name) {
                return Err(CliError::parse(
                    s.line,
                    format!("{} '{name}' declared twice", s.kind),
                ));
            }
        }
        match s.kind.as_str() {
            "scenario" => self.scenario_section(s),
            "space" => self.space_section(s),
            "homeo" => self.homeo_section(s),
            "point" => self.point_section(s),
            "path" => self.path_section(s),
            "measure" => self.measure_section(s),
            "generators" => self.generators_section(s),
            _ => self.analysis_section(s),
        }
    }

    fn scenario_section(&mut self, s: &Section) -> Result<()> {
        if self.seen_scenario {
            return Err(CliError::parse(s.line, "[scenario] appears twice"));
        }
        self.seen_scenario = true;
        s.allow(&["name", "seed", "budget"])?;
        self.name = s.get("name").map(|e| e.value.clone());
        self.seed = s.get("seed").map(integer).transpose()?;
        self.budget = s.get("budget").map(integer).transpose()?;
        Ok(())
    }

    fn space_section(&mut self, s: &Section) -> Result<()> {
        s.allow(&["kind", "class"])?;
        let e = s.req("kind")?;
        let kind = SpaceKind::parse(&e.value).ok_or_else(|| {
            let known: Vec<&str> = SpaceKind::ALL.iter().map(|k| k.name()).collect();
            CliError::parse(
                e.line,
                format!(
                    "unknown space kind '{}' (one of {})",
                    e.value,
                    known.join(", ")
                ),
            )
        })?;
        let space = match s.get("class") {
            None => match kind {
                SpaceKind::Circle => Space::circle(),
                SpaceKind::Annulus => Space::annulus(),
                SpaceKind::Torus2 => Space::torus2(1, 0),
                SpaceKind::CircleTimesCompactifiedLine => Space::compactified_torus(),
            },
            Some(e) => {
                let mut pairing = Vec::new();
                for item in list(e)? {
                    pairing.push(item.parse::<i64>().map_err(|_| {
                        CliError::parse(e.line, format!("class entries are integers, got '{item}'"))
                    })?);
                }
                Space::new(kind, pairing).map_err(|err| CliError::parse(e.line, err.to_string()))?
            }
        };
        let name = s.name.clone().unwrap_or_else(|| "main".to_string());
        if self.declared("space", &name) {
            return Err(CliError::parse(
                s.line,
                format!("space '{name}' declared twice"),
            ));
        }
        self.spaces.push(Named {
            name,
            line: s.line,
            item: space,
        });
        Ok(())
    }

    fn homeo_section(&mut self, s: &Section) -> Result<()> {
        let forms = ["family", "compose", "inverse", "of"];
        let present: Vec<&str> = forms
            .iter()
            .copied()
            .filter(|k| s.get(k).is_some())
            .collect();
        if present.len() != 1 {
            return Err(CliError::parse(
                s.line,
                format!(
                    "{} needs exactly one of family, compose, inverse, of",
                    s.header()
                ),
            ));
        }
        let item = match present[0] {
            "family" => self.family(s)?,
            "compose" => {
                s.allow(&["compose"])?;
                let e = s.req("compose")?;
                let mut parts = Vec::new();
                for name in list(e)? {
                    parts.push(self.resolve("homeo", name, e.line)?);
                }
                HomeoDef::Compose(parts)
            }
            "inverse" => {
                s.allow(&["inverse"])?;
                HomeoDef::Inverse(self.reference(s, "homeo", "inverse")?)
            }
            _ => {
                s.allow(&["of", "power", "sampled"])?;
                let of = self.reference(s, "homeo", "of")?;
                match (s.get("power"), s.get("sampled")) {
                    (Some(e), None) => HomeoDef::Power { of, n: integer(e)? },
                    (None, Some(e)) => HomeoDef::Sampled {
                        of,
                        resolution: integer(e)?,
                    },
                    _ => {
                        return Err(CliError::parse(
                            s.line,
                            format!(
                                "{} with 'of' needs exactly one of power, sampled",
                                s.header()
                            ),
                        ))
                    }
                }
            }
        };
        if matches!(
            item,
            HomeoDef::Identity { ref space } | HomeoDef::Family { ref space, .. } | HomeoDef::Pl { ref space, .. }
                if space == IMPLICIT
        ) {
            self.implicit_space.push(self.homeos.len());
        }
        self.homeos.push(Named {
            name: s.name.clone().unwrap_or_default(),
            line: s.line,
            item,
        });
        Ok(())
    }

    fn family(&mut self, s: &Section) -> Result<HomeoDef> {
        let e = s.req("family")?;
        let keys: &[&str] = match e.value.as_str() {
            "Identity" => &[],
            "RigidRotation" => &["rho"],
            "AnnulusTwist" => &["inner", "outer"],
            "TorusShear" => &["power"],
            "TorusBump" => &["amplitude"],
            "TorusTranslation" => &["a", "b"],
            "GradientTimeOne" => &["strength"],
            "PL" => &["knots"],
            other => {
                return Err(CliError::parse(
                    e.line,
                    format!("unknown family '{other}' (see list-families)"),
                ))
            }
        };
        let mut allowed = vec!["family", "space"];
        allowed.extend_from_slice(keys);
        s.allow(&allowed)?;
        let space = self.space_reference(s)?;
        let num = |b: &mut Builder, key: &str| -> Result<Surd> {
            let e = s.req(key)?;
            b.surd(&e.value, e.line)
        };
        let family = match e.value.as_str() {
            "Identity" => return Ok(HomeoDef::Identity { space }),
            "PL" => {
                let e = s.req("knots")?;
                let mut knots = Vec::new();
                for item in list(e)? {
                    let (x, y) = item.split_once(':').ok_or_else(|| {
                        CliError::parse(e.line, format!("knot '{item}' is not of the form x:y"))
                    })?;
                    knots.push((self.surd(x.trim(), e.line)?, self.surd(y.trim(), e.line)?));
                }
                return Ok(HomeoDef::Pl { space, knots });
            }
            "RigidRotation" => Family::RigidRotation {
                rho: num(self, "rho")?,
            },
            "AnnulusTwist" => Family::AnnulusTwist {
                inner: num(self, "inner")?,
                outer: num(self, "outer")?,
            },
            "TorusShear" => Family::TorusShear {
                power: s.get("power").map(integer).transpose()?.unwrap_or(1),
            },
            "TorusBump" => Family::TorusBump {
                amplitude: num(self, "amplitude")?,
            },
            "TorusTranslation" => Family::TorusTranslation {
                a: num(self, "a")?,
                b: num(self, "b")?,
            },
            _ => Family::GradientTimeOne {
                strength: num(self, "strength")?,
            },
        };
        Ok(HomeoDef::Family { space, family })
    }

    fn point_section(&mut self, s: &Section) -> Result<()> {
        s.allow(&["at"])?;
        let e = s.req("at")?;
        let coords = list(e)?;
        let point = match coords.as_slice() {
            [x] => Point::circle(self.coordinate(x, e.line)?),
            [x, y] => Point::new(self.coordinate(x, e.line)?, self.coordinate(y, e.line)?),
            _ => {
                return Err(CliError::parse(
                    e.line,
                    "a point has one or two coordinates",
                ))
            }
        };
        if point.s.is_infinite() {
            return Err(CliError::parse(
                e.line,
                "the first coordinate is an angle and must be finite",
            ));
        }
        self.points.push(Named {
            name: s.name.clone().unwrap_or_default(),
            line: s.line,
            item: point,
        });
        Ok(())
    }

    fn path_section(&mut self, s: &Section) -> Result<()> {
        s.allow(&["through", "windings"])?;
        let e = s.req("through")?;
        let mut through = Vec::new();
        for name in list(e)? {
            through.push(self.resolve("point", name, e.line)?);
        }
        if through.len() < 2 {
            return Err(CliError::parse(
                e.line,
                "a path runs through at least two points",
            ));
        }
        let windings = match s.get("windings") {
            None => vec![[0, 0]; through.len() - 1],
            Some(e) => {
                let mut out = Vec::new();
                for item in list(e)? {
                    let parsed = item
                        .split_once(':')
                        .and_then(|(i, j)| Some([i.trim().parse().ok()?, j.trim().parse().ok()?]));
                    out.push(parsed.ok_or_else(|| {
                        CliError::parse(e.line, format!("winding '{item}' is not of the form i:j"))
                    })?);
                }
                if out.len() != through.len() - 1 {
                    return Err(CliError::parse(e.line, "one winding per segment"));
                }
                out
            }
        };
        self.paths.push(Named {
            name: s.name.clone().unwrap_or_default(),
            line: s.line,
            item: PathDef { through, windings },
        });
        Ok(())
    }

    fn measure_section(&mut self, s: &Section) -> Result<()> {
        let e = s.req("kind")?;
        let item = match e.value.as_str() {
            "circle" => {
                s.allow(&["kind", "space", "circle"])?;
                let c = s.req("circle")?;
                MeasureDef::Circle {
                    space: self.space_reference(s)?,
                    circle: circle(&c.value, c.line)?,
                }
            }
            "atoms" => {
                s.allow(&["kind", "space", "points", "weights"])?;
                let p = s.req("points")?;
                let mut points = Vec::new();
                for name in list(p)? {
                    points.push(self.resolve("point", name, p.line)?);
                }
                let weights = match s.get("weights") {
                    None => vec![1.0 / points.len() as f64; points.len()],
                    Some(w) => {
                        let mut out = Vec::new();
                        for item in list(w)? {
                            out.push(self.real(item, w.line)?);
                        }
                        if out.len() != points.len() {
                            return Err(CliError::parse(w.line, "one weight per point"));
                        }
                        out
                    }
                };
                MeasureDef::Atoms {
                    space: self.space_reference(s)?,
                    points,
                    weights,
                }
            }
            "empirical" => {
                s.allow(&["kind", "homeo", "start", "length"])?;
                MeasureDef::Empirical {
                    homeo: self.reference(s, "homeo", "homeo")?,
                    start: self.reference(s, "point", "start")?,
                    length: integer(s.req("length")?)?,
                }
            }
            other => {
                return Err(CliError::parse(
                    e.line,
                    format!("unknown measure kind '{other}' (circle, atoms, empirical)"),
                ))
            }
        };
        if matches!(
            item,
            MeasureDef::Circle { ref space, .. } | MeasureDef::Atoms { ref space, .. } if space == IMPLICIT
        ) {
            self.implicit_measure_space.push(self.measures.len());
        }
        self.measures.push(Named {
            name: s.name.clone().unwrap_or_default(),
            line: s.line,
            item,
        });
        Ok(())
    }

    fn generators_section(&mut self, s: &Section) -> Result<()> {
        s.allow(&["use", "level"])?;
        let e = s.req("use")?;
        let mut uses = Vec::new();
        for name in list(e)? {
            uses.push(self.resolve("homeo", name, e.line)?);
        }
        let level = s
            .get("level")
            .map(integer)
            .transpose()?
            .unwrap_or(undistort::wordgeom::DEFAULT_SEMINORM_LEVEL);
        self.generators.push(Named {
            name: s.name.clone().unwrap_or_default(),
            line: s.line,
            item: GeneratorDef { uses, level },
        });
        Ok(())
    }

    fn constant(&mut self, s: &Section) -> Result<Constant> {
        match (s.get("generators"), s.get("constant")) {
            (None, None) => Ok(Constant::PerUnit),
            (Some(e), None) => Ok(Constant::Generators(self.resolve(
                "generators",
                &e.value,
                e.line,
            )?)),
            (None, Some(e)) => Ok(Constant::Value(self.real(&e.value, e.line)?)),
            (Some(_), Some(e)) => Err(CliError::parse(
                e.line,
                "give either 'generators' or 'constant', not both",
            )),
        }
    }

    fn analysis_section(&mut self, s: &Section) -> Result<()> {
        let kind = s.name.as_deref().unwrap_or_default();
        let Some((_, keys)) = ANALYSES.iter().find(|(name, _)| *name == kind) else {
            return Err(CliError::parse(
                s.line,
                format!("unknown analysis '{kind}' (see list-families)"),
            ));
        };
        let mut allowed: Vec<&str> = keys
            .split([',', '|'])
            .map(|k| k.split('=').next().unwrap_or("").trim())
            .collect();
        allowed.push("id");
        s.allow(&allowed)?;
        let opt_int = |key: &str| -> Result<Option<usize>> { s.get(key).map(integer).transpose() };
        let homeo = || self.reference(s, "homeo", "homeo");
        let point = |key: &str| self.reference(s, "point", key);
        let analysis = match kind {
            "k" => {
                let point = self.optional_reference(s, "point", "point")?;
                let samples = opt_int("samples")?.unwrap_or(0);
                if point.is_none() == (samples == 0) {
                    return Err(CliError::parse(
                        s.line,
                        "[analysis k] needs exactly one of point, samples",
                    ));
                }
                Analysis::K {
                    homeo: homeo()?,
                    point,
                    samples,
                    power: s.get("power").map(integer).transpose()?.unwrap_or(1),
                }
            }
            "seminorm" => Analysis::Seminorm {
                homeo: homeo()?,
                level: s
                    .get("level")
                    .map(integer)
                    .transpose()?
                    .unwrap_or(undistort::wordgeom::DEFAULT_SEMINORM_LEVEL),
            },
            "gcocycle" => Analysis::GCocycle {
                homeo: homeo()?,
                point: point("point")?,
                range: opt_int("range")?.unwrap_or(DEFAULT_GCOCYCLE_RANGE),
            },
            "rot" => Analysis::Rot {
                homeo: homeo()?,
                point: point("point")?,
                budget: opt_int("budget")?,
            },
            "defect" => Analysis::Defect {
                homeo: homeo()?,
                x: point("x")?,
                y: point("y")?,
                range: opt_int("range")?.unwrap_or(DEFAULT_DEFECT_RANGE),
            },
            "certify-rotation" => Analysis::CertifyRotation {
                homeo: homeo()?,
                x: point("x")?,
                y: point("y")?,
                budget: opt_int("budget")?,
                constant: self.constant(s)?,
            },
            "certify-fixed" => Analysis::CertifyFixed {
                homeo: homeo()?,
                x: point("x")?,
                y: point("y")?,
                path: self.optional_reference(s, "path", "path")?,
                constant: self.constant(s)?,
            },
            "nielsen" => Analysis::Nielsen {
                homeo: homeo()?,
                mu: self.reference(s, "measure", "mu")?,
                nu: self.reference(s, "measure", "nu")?,
                constant: self.constant(s)?,
            },
            "scc" => {
                let c = s.req("circle")?;
                Analysis::Scc {
                    homeo: homeo()?,
                    circle: circle(&c.value, c.line)?,
                    budget: opt_int("budget")?,
                }
            }
            "rationality" => {
                let c = s.req("circles")?;
                let items = list(c)?;
                let [a, b] = items.as_slice() else {
                    return Err(CliError::parse(
                        c.line,
                        "rationality compares exactly two circles",
                    ));
                };
                Analysis::Rationality {
                    homeo: homeo()?,
                    circles: [circle(a, c.line)?, circle(b, c.line)?],
                    budget: opt_int("budget")?,
                }
            }
            "ball" => Analysis::Ball {
                generators: self.reference(s, "generators", "generators")?,
                radius: integer(s.req("radius")?)?,
                cap: opt_int("cap")?,
            },
            "wordnorm" => Analysis::WordNorm {
                homeo: homeo()?,
                generators: self.reference(s, "generators", "generators")?,
                radius: integer(s.req("radius")?)?,
                cap: opt_int("cap")?,
            },
            _ => {
                let mut certificates = Vec::new();
                if let Some(e) = s.get("certificates") {
                    for id in list(e)? {
                        match self.ids.get(id) {
                            Some(true) => certificates.push(id.to_string()),
                            Some(false) => {
                                return Err(CliError::parse(
                                    e.line,
                                    format!("analysis '{id}' does not produce a certificate"),
                                ))
                            }
                            None => {
                                return Err(CliError::parse(
                                    e.line,
                                    format!("unresolved reference to analysis '{id}' (declare it before use)"),
                                ))
                            }
                        }
                    }
                }
                Analysis::Tau {
                    homeo: homeo()?,
                    generators: self.reference(s, "generators", "generators")?,
                    radius: integer(s.req("radius")?)?,
                    cap: opt_int("cap")?,
                    certificates,
                }
            }
        };
        let id = match s.get("id") {
            None => None,
            Some(e) => {
                if self.ids.contains_key(&e.value) {
                    return Err(CliError::parse(
                        e.line,
                        format!("analysis id '{}' used twice", e.value),
                    ));
                }
                self.ids
                    .insert(e.value.clone(), analysis.produces_certificate());
                Some(e.value.clone())
            }
        };
        self.analyses.push(AnalysisSpec {
            id,
            line: s.line,
            analysis,
        });
        Ok(())
    }

    fn finish(mut self) -> Result<Scenario> {
        let only_space = match self.spaces.as_slice() {
            [one] => Some(one.name.clone()),
            _ => None,
        };
        let missing = |line: usize| {
            CliError::parse(
                line,
                if self.spaces.is_empty() {
                    "no [space] section declared".to_string()
                } else {
                    "'space' is required when several spaces are declared".to_string()
                },
            )
        };
        for &i in &self.implicit_space {
            let line = self.homeos[i].line;
            let name = only_space.clone().ok_or_else(|| missing(line))?;
            match &mut self.homeos[i].item {
                HomeoDef::Identity { space }
                | HomeoDef::Family { space, .. }
                | HomeoDef::Pl { space, .. } => *space = name,
                _ => unreachable!("only base maps name a space"),
            }
        }
        for &i in &self.implicit_measure_space {
            let line = self.measures[i].line;
            let name = only_space.clone().ok_or_else(|| missing(line))?;
            match &mut self.measures[i].item {
                MeasureDef::Circle { space, .. } | MeasureDef::Atoms { space, .. } => *space = name,
                MeasureDef::Empirical { .. } => {
                    unreachable!("orbit measures live on their map's space")
                }
            }
        }
        if self.spaces.is_empty() {
            return Err(CliError::parse(1, "no [space] section declared"));
        }
        Ok(Scenario {
            name: self.name.unwrap_or_else(|| "scenario".to_string()),
            seed: self.seed.unwrap_or(0),
            budget: self.budget.unwrap_or(DEFAULT_BUDGET),
            spaces: self.spaces,
            homeos: self.homeos,
            points: self.points,
            paths: self.paths,
            measures: self.measures,
            generators: self.generators,
            analyses: self.analyses,
        })
    }
}
