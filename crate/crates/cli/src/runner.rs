//! Builds the objects of a scenario and runs its analyses in declaration
//! order. Analysis failures are recorded in the report and the run goes
//! on; any failure makes the exit code 2.

use std::collections::HashMap;

use undistort::cocycle::{k_identity_residual, k_power, seminorm};
use undistort::measure::{
    certify_two_measures, nielsen_gap, rationality_check, scc_rotation_integral, Measure,
};
use undistort::quasi::{certify_two_fixed_points, certify_two_rotation_points, defect_estimate};
use undistort::rotation::{local_rotation_number, Powers};
use undistort::wordgeom::{ball, node_cap_from_env, translation_length, word_norm, GenSet};
use undistort::{sampling, Certificate, Error, Homeo, Path, PlCircleMap, Point, Space};

use crate::report::{Record, Report, Table};
use crate::scenario::{Analysis, AnalysisSpec, Constant, HomeoDef, MeasureDef, Scenario};
use crate::{EXIT_OK, EXIT_PRECONDITION};

/// Orbit budgets above this are clamped, and the clamp is flagged.
pub const MAX_BUDGET: usize = 1 << 22;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub budget: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub exit_code: i32,
}

struct Env {
    spaces: HashMap<String, Space>,
    homeos: HashMap<String, Homeo>,
    points: HashMap<String, Point>,
    paths: HashMap<String, Path>,
    measures: HashMap<String, Measure>,
    gensets: HashMap<String, GenSet>,
    certificates: HashMap<String, Certificate>,
    seed: u64,
    budget: usize,
    node_cap: usize,
}

type Result<T> = std::result::Result<T, Error>;

pub fn run(scenario: &Scenario, options: &RunOptions) -> Outcome {
    let seed = options.seed.unwrap_or(scenario.seed);
    let budget = options.budget.unwrap_or(scenario.budget);
    let mut report = Report::default();
    let h = &mut report.header;
    h.push(("scenario".into(), scenario.name.clone()));
    h.push(("seed".into(), seed.to_string()));
    h.push(("budget".into(), budget.to_string()));
    let node_cap = node_cap_from_env();
    h.push(("node_cap".into(), node_cap.to_string()));
    let mut env = Env {
        spaces: HashMap::new(),
        homeos: HashMap::new(),
        points: HashMap::new(),
        paths: HashMap::new(),
        measures: HashMap::new(),
        gensets: HashMap::new(),
        certificates: HashMap::new(),
        seed,
        budget,
        node_cap,
    };
    if let Err((line, err)) = build(scenario, &mut env, &mut report) {
        report.header.push((
            "error".into(),
            format!("line {line}: {}", describe_error(&err)),
        ));
        return Outcome {
            report,
            exit_code: EXIT_PRECONDITION,
        };
    }
    report
        .header
        .push(("analyses".into(), scenario.analyses.len().to_string()));
    for (i, spec) in scenario.analyses.iter().enumerate() {
        let mut record = Record::new(i + 1, spec.analysis.name());
        record.push("line", spec.line);
        if let Some(id) = &spec.id {
            record.push("id", id);
        }
        if let Err(err) = analyse(spec, &mut env, &mut record, &mut report.tables) {
            record.push("error", describe_error(&err));
        }
        report.records.push(record);
    }
    let exit_code = if report.has_errors() {
        EXIT_PRECONDITION
    } else {
        EXIT_OK
    };
    Outcome { report, exit_code }
}

fn describe_error(err: &Error) -> String {
    let kind = match err {
        Error::Precondition(_) => "precondition",
        Error::Domain(_) => "domain",
        Error::SpaceMismatch { .. } => "space mismatch",
        Error::ClassMismatch { .. } => "class mismatch",
        Error::NonInvertible(_) => "non-invertible",
        Error::UnsupportedFlavor(_) => "unsupported",
        Error::Parse(_) => "parse",
    };
    format!("{kind}: {err}")
}

fn build(
    s: &Scenario,
    env: &mut Env,
    report: &mut Report,
) -> std::result::Result<(), (usize, Error)> {
    for sp in &s.spaces {
        report
            .header
            .push((format!("space.{}", sp.name), sp.item.describe()));
        env.spaces.insert(sp.name.clone(), sp.item.clone());
    }
    for hd in &s.homeos {
        let g = build_homeo(&hd.item, env).map_err(|e| (hd.line, e))?;
        report
            .header
            .push((format!("homeo.{}", hd.name), g.describe()));
        env.homeos.insert(hd.name.clone(), g);
    }
    for p in &s.points {
        report
            .header
            .push((format!("point.{}", p.name), p.item.to_string()));
        env.points.insert(p.name.clone(), p.item);
    }
    for p in &s.paths {
        let vertices = p.item.through.iter().map(|n| env.points[n]).collect();
        let path = Path::new(vertices, p.item.windings.clone()).map_err(|e| (p.line, e))?;
        report
            .header
            .push((format!("path.{}", p.name), p.item.through.join(" -> ")));
        env.paths.insert(p.name.clone(), path);
    }
    for m in &s.measures {
        let mu = match &m.item {
            MeasureDef::Circle { space, circle } => Measure::circle(&env.spaces[space], *circle),
            MeasureDef::Atoms {
                space,
                points,
                weights,
            } => Measure::atomic(
                &env.spaces[space],
                points.iter().map(|n| env.points[n]).collect(),
                weights.clone(),
            ),
            MeasureDef::Empirical {
                homeo,
                start,
                length,
            } => Measure::empirical(&env.homeos[homeo], env.points[start], *length),
        }
        .map_err(|e| (m.line, e))?;
        report
            .header
            .push((format!("measure.{}", m.name), mu.describe()));
        env.measures.insert(m.name.clone(), mu);
    }
    for gs in &s.generators {
        let named = gs
            .item
            .uses
            .iter()
            .map(|n| (n.clone(), env.homeos[n].clone()))
            .collect();
        let set = GenSet::new(named, gs.item.level).map_err(|e| (gs.line, e))?;
        report.header.push((
            format!("generators.{}", gs.name),
            format!("{} (C = {:?})", gs.item.uses.join(" "), set.constant()),
        ));
        env.gensets.insert(gs.name.clone(), set);
    }
    Ok(())
}

fn build_homeo(def: &HomeoDef, env: &Env) -> Result<Homeo> {
    match def {
        HomeoDef::Identity { space } => Ok(Homeo::identity(&env.spaces[space])),
        HomeoDef::Family { space, family } => {
            Homeo::from_family(&env.spaces[space], family.clone())
        }
        HomeoDef::Pl { space, knots } => {
            Homeo::pl(&env.spaces[space], PlCircleMap::new(knots.clone())?)
        }
        HomeoDef::Compose(parts) => {
            let mut acc = env.homeos[&parts[0]].clone();
            for name in &parts[1..] {
                acc = acc.compose(&env.homeos[name])?;
            }
            Ok(acc)
        }
        HomeoDef::Inverse(of) => env.homeos[of].inverse(),
        HomeoDef::Power { of, n } => env.homeos[of].power(*n),
        HomeoDef::Sampled { of, resolution } => Homeo::sampled(&env.homeos[of], *resolution),
    }
}

fn table_name(record: &Record, label: &str) -> String {
    format!("{:02}_{}_{label}.csv", record.index, record.kind)
}

fn add_table(
    record: &mut Record,
    tables: &mut Vec<Table>,
    label: &str,
    header: &[&str],
    rows: Vec<Vec<String>>,
) {
    let file = table_name(record, label);
    record.push(
        format!("table.{label}"),
        format!("{file} ({} rows)", rows.len()),
    );
    tables.push(Table {
        file,
        header: header.iter().map(|h| h.to_string()).collect(),
        rows,
    });
}

fn real(v: f64) -> String {
    format!("{v:?}")
}

impl Env {
    fn orbit_budget(&self, own: Option<usize>, record: &mut Record) -> usize {
        let requested = own.unwrap_or(self.budget);
        record.push("budget", requested);
        if requested > MAX_BUDGET {
            record.push("budget_capped", format!("true (clamped to {MAX_BUDGET})"));
            MAX_BUDGET
        } else {
            requested
        }
    }

    fn constant(&self, c: &Constant, record: &mut Record) -> Option<f64> {
        match c {
            Constant::PerUnit => None,
            Constant::Generators(name) => {
                record.push("generators", name);
                Some(self.gensets[name].constant())
            }
            Constant::Value(v) => Some(*v),
        }
    }

    fn cap(&self, own: Option<usize>, record: &mut Record) -> usize {
        let cap = own.unwrap_or(self.node_cap);
        record.push("cap", cap);
        cap
    }
}

fn flag_truncated(record: &mut Record, truncated: bool) {
    record.push("truncated", truncated);
    if truncated {
        record.push(
            "note",
            "node cap exceeded; results cover the explored part of the ball",
        );
    }
}

fn certificate(record: &mut Record, spec: &AnalysisSpec, env: &mut Env, cert: Certificate) {
    for line in cert.to_kv_lines("certificate") {
        let (k, v) = line
            .split_once(" = ")
            .expect("certificate lines are key = value");
        record.push(k, v);
    }
    if let Some(id) = &spec.id {
        env.certificates.insert(id.clone(), cert);
    }
}

fn analyse(
    spec: &AnalysisSpec,
    env: &mut Env,
    record: &mut Record,
    tables: &mut Vec<Table>,
) -> Result<()> {
    match &spec.analysis {
        Analysis::K {
            homeo,
            point,
            samples,
            power,
        } => {
            let g = &env.homeos[homeo];
            record.push("homeo", homeo);
            record.push("power", power);
            if let Some(p) = point {
                let x = env.points[p];
                record.push("point", format!("{p} {x}"));
                record.real("k", k_power(g, &x, *power)?);
                return Ok(());
            }
            let seed = env.seed.wrapping_add(record.index as u64);
            record.push("samples", samples);
            record.push("sample_seed", seed);
            let mut rng = sampling::rng(seed);
            let mut rows = Vec::with_capacity(*samples);
            let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
            for _ in 0..*samples {
                let x = g.space().sample_point(&mut rng);
                let k = k_power(g, &x, *power)?;
                lo = lo.min(k);
                hi = hi.max(k);
                sum += k;
                rows.push(vec![real(x.s), real(x.t), real(k)]);
            }
            record.real("min", lo);
            record.real("max", hi);
            record.real("mean", sum / *samples as f64);
            // K(gh) = K(g)∘h + K(h), checked against the map itself
            if *power == 1 {
                record.real(
                    "identity_residual",
                    k_identity_residual(g, g, *samples, seed)?,
                );
            }
            add_table(record, tables, "samples", &["s", "t", "k"], rows);
        }
        Analysis::Seminorm { homeo, level } => {
            record.push("homeo", homeo);
            let sn = seminorm(&env.homeos[homeo], *level)?;
            record.push("level", sn.level);
            record.real("value", sn.value);
            record.push(
                "certified_upper",
                sn.certified_upper.map_or("none".to_string(), real),
            );
            record.real("mesh", sn.mesh);
            record.push("argmin", sn.argmin);
            record.push("argmax", sn.argmax);
        }
        Analysis::GCocycle {
            homeo,
            point,
            range,
        } => {
            let x = env.points[point];
            record.push("homeo", homeo);
            record.push("point", format!("{point} {x}"));
            record.push("range", range);
            let powers = Powers::new(&env.homeos[homeo]);
            let r = *range as i64;
            let mut rows = Vec::new();
            let mut sup = 0.0f64;
            for m in -r..=r {
                for n in -r..=r {
                    let v = powers.g_cocycle(&x, m, n)?;
                    sup = sup.max(v.abs());
                    rows.push(vec![m.to_string(), n.to_string(), real(v)]);
                }
            }
            record.real("sup", sup);
            add_table(record, tables, "table", &["m", "n", "g"], rows);
        }
        Analysis::Rot {
            homeo,
            point,
            budget,
        } => {
            let x = env.points[point];
            record.push("homeo", homeo);
            record.push("point", format!("{point} {x}"));
            let n = env.orbit_budget(*budget, record);
            let est = local_rotation_number(&x, &env.homeos[homeo], n)?;
            record.push("n_used", est.n_used);
            record.real("r", est.r);
            record.real("rot", est.rot);
            record.real("classical", est.classical);
            record.real("residual_band", est.residual_band);
            record.push("bounded", est.bounded_verdict);
            let d = &est.diagnostic;
            record.push("diagnostic.range", d.range);
            record.real("diagnostic.sup", d.sup);
            record.real("diagnostic.slope", d.slope);
            record.push("diagnostic.one_sided", d.one_sided);
            let rows = d
                .levels
                .iter()
                .map(|&(n, s)| vec![n.to_string(), real(s)])
                .collect();
            add_table(record, tables, "levels", &["range", "sup"], rows);
        }
        Analysis::Defect { homeo, x, y, range } => {
            let (px, py) = (env.points[x], env.points[y]);
            record.push("homeo", homeo);
            record.push("x", format!("{x} {px}"));
            record.push("y", format!("{y} {py}"));
            let d = defect_estimate(&px, &py, &env.homeos[homeo], *range)?;
            record.push("range", d.range);
            record.real("sampled", d.sampled);
            record.real("norm_x", d.norm_x);
            record.real("norm_y", d.norm_y);
            record.real("bound", d.bound);
            record.push("holds", d.holds);
        }
        Analysis::CertifyRotation {
            homeo,
            x,
            y,
            budget,
            constant,
        } => {
            let (px, py) = (env.points[x], env.points[y]);
            record.push("homeo", homeo);
            record.push("x", format!("{x} {px}"));
            record.push("y", format!("{y} {py}"));
            let n = env.orbit_budget(*budget, record);
            let c = env.constant(constant, record);
            let cert = certify_two_rotation_points(&px, &py, &env.homeos[homeo], n, c)?;
            certificate(record, spec, env, cert);
        }
        Analysis::CertifyFixed {
            homeo,
            x,
            y,
            path,
            constant,
        } => {
            let (px, py) = (env.points[x], env.points[y]);
            record.push("homeo", homeo);
            record.push("x", format!("{x} {px}"));
            record.push("y", format!("{y} {py}"));
            let gamma = match path {
                Some(name) => {
                    record.push("path", name);
                    env.paths[name].clone()
                }
                None => {
                    record.push("path", "straight");
                    Path::straight(vec![px, py])?
                }
            };
            let c = env.constant(constant, record);
            let cert = certify_two_fixed_points(&px, &py, &env.homeos[homeo], &gamma, c)?;
            certificate(record, spec, env, cert);
        }
        Analysis::Nielsen {
            homeo,
            mu,
            nu,
            constant,
        } => {
            let g = &env.homeos[homeo];
            record.push("homeo", homeo);
            record.push("class", g.space().describe());
            record.push("mu", format!("{mu} {}", env.measures[mu].describe()));
            record.push("nu", format!("{nu} {}", env.measures[nu].describe()));
            let (m, n) = (&env.measures[mu], &env.measures[nu]);
            let ng = nielsen_gap(m, n, g)?;
            record.real("integral_mu", ng.integral_mu);
            record.real("integral_nu", ng.integral_nu);
            record.real("gap", ng.gap);
            record.real("tolerance", ng.tolerance);
            record.push("equivalent", ng.equivalent);
            let c = env.constant(constant, record);
            let cert = certify_two_measures(m, n, g, c)?;
            certificate(record, spec, env, cert);
        }
        Analysis::Scc {
            homeo,
            circle,
            budget,
        } => {
            record.push("homeo", homeo);
            record.push("circle", circle);
            let n = env.orbit_budget(*budget, record);
            let scc = scc_rotation_integral(circle, &env.homeos[homeo], n)?;
            record.real("translation", scc.translation);
            record.real("rotation", scc.rotation);
            record.push("pairing", scc.pairing);
            record.real("product", scc.product);
            record.real("k_integral", scc.k_integral);
            record.push("iterations", scc.iterations);
            record.real("integration_error", scc.error);
        }
        Analysis::Rationality {
            homeo,
            circles,
            budget,
        } => {
            record.push("homeo", homeo);
            let n = env.orbit_budget(*budget, record);
            let g = &env.homeos[homeo];
            let a = scc_rotation_integral(&circles[0], g, n)?;
            let b = scc_rotation_integral(&circles[1], g, n)?;
            for (i, (c, s)) in circles.iter().zip([&a, &b]).enumerate() {
                record.push(format!("circle_{}", i + 1), c);
                record.real(format!("rotation_{}", i + 1), s.rotation);
                record.push(format!("pairing_{}", i + 1), s.pairing);
            }
            let rc = rationality_check(a.rotation, a.pairing, b.rotation, b.pairing);
            let pair = |p: Option<(i64, i64)>, sep: &str| {
                p.map_or("none".to_string(), |(x, y)| format!("{x}{sep}{y}"))
            };
            record.push("applicable", rc.applicable);
            record.push(
                "relation",
                rc.relation.map_or(
                    "no relation found at this precision".to_string(),
                    |(k1, k2)| format!("{k1}*rho_1 ≡ {k2}*rho_2 (mod 1)"),
                ),
            );
            record.push("rational_1", pair(rc.rational_1, "/"));
            record.push("rational_2", pair(rc.rational_2, "/"));
        }
        Analysis::Ball {
            generators,
            radius,
            cap,
        } => {
            let set = &env.gensets[generators];
            record.push("generators", generators);
            record.push("radius", radius);
            let cap = env.cap(*cap, record);
            let b = ball(set, *radius, cap)?;
            let sizes: Vec<String> = b.sizes.iter().map(|s| s.to_string()).collect();
            record.push("sizes", sizes.join(" "));
            record.push("elements", b.nodes.len());
            flag_truncated(record, b.truncated);
            let rows = b
                .nodes
                .iter()
                .map(|n| vec![n.length.to_string(), set.word_string(&n.witness)])
                .collect();
            add_table(record, tables, "elements", &["length", "witness"], rows);
        }
        Analysis::WordNorm {
            homeo,
            generators,
            radius,
            cap,
        } => {
            let set = &env.gensets[generators];
            record.push("homeo", homeo);
            record.push("generators", generators);
            record.push("radius", radius);
            let cap = env.cap(*cap, record);
            let w = word_norm(&env.homeos[homeo], set, *radius, cap)?;
            record.push(
                "exact",
                w.exact
                    .map_or(format!("none (longer than {radius})"), |n| n.to_string()),
            );
            record.push(
                "witness",
                w.witness
                    .as_deref()
                    .map_or("none".to_string(), |w| set.word_string(w)),
            );
            record.real("lower_bound", w.lower_bound);
            record.real("seminorm", w.seminorm);
            flag_truncated(record, w.truncated);
        }
        Analysis::Tau {
            homeo,
            generators,
            radius,
            cap,
            certificates,
        } => {
            let set = &env.gensets[generators];
            record.push("homeo", homeo);
            record.push("generators", generators);
            record.push("radius", radius);
            let cap = env.cap(*cap, record);
            let mut certs = Vec::new();
            for id in certificates {
                // a referenced analysis that failed leaves no certificate
                match env.certificates.get(id) {
                    Some(c) => certs.push(c.clone()),
                    None => {
                        return Err(Error::Precondition(format!(
                            "certificate '{id}' is unavailable because its analysis failed"
                        )))
                    }
                }
            }
            record.push("certificates", certificates.join(" "));
            let tl = translation_length(&env.homeos[homeo], set, *radius, cap, &certs)?;
            record.push("upper", tl.upper.map_or("none".to_string(), real));
            record.real("lower", tl.lower);
            flag_truncated(record, tl.truncated);
            let rows = tl
                .power_norms
                .iter()
                .map(|&(n, len)| vec![n.to_string(), len.to_string()])
                .collect();
            add_table(record, tables, "powers", &["n", "word_norm"], rows);
        }
    }
    Ok(())
}
