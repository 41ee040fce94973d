//! Acceptance suite. Prints one PASS/FAIL line per criterion with its
//! pinned tolerance, measured value and runtime, and exits non-zero if any
//! criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use undistort::cocycle::{g_cocycle_powers, k_identity_residual, k_power};
use undistort::measure::{certify_two_measures, InvariantCircle, Measure};
use undistort::quasi::{certify_two_rotation_points, defect_estimate, q_value};
use undistort::rotation::{circular_distance, local_rotation_number, BoundedVerdict};
use undistort::space::{cocycle_from_potential, potential_from_cocycle, PathIntegralCocycle};
use undistort::wordgeom::{ball, word_norm, GenSet, DEFAULT_SEMINORM_LEVEL};
use undistort::{
    sampling, CoverPoint, Homeo, Mechanism, Path, PlCircleMap, Point, Space, SpaceKind, Surd,
    Verdict,
};

struct Check {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Check {
    Check {
        pass,
        detail: detail.into(),
    }
}

fn criterion(n: usize, name: &str, time_limit: Option<f64>, body: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(body));
    let elapsed = start.elapsed().as_secs_f64();
    let (pass, detail) = match result {
        Ok(c) => (c.pass, c.detail),
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        }
    };
    let in_time = time_limit.is_none_or(|limit| elapsed < limit);
    let limit = time_limit.map_or(String::new(), |l| format!(" (limit {l} s)"));
    let verdict = if pass && in_time { "PASS" } else { "FAIL" };
    println!("criterion {n} [{verdict}] {name}: {detail}; runtime {elapsed:.3} s{limit}");
    pass && in_time
}

fn q(n: i64, d: i64) -> Surd {
    Surd::ratio(n, d)
}

fn random_pl<R: Rng>(rng: &mut R) -> PlCircleMap {
    let n = rng.gen_range(1..=4);
    let mut xs: Vec<i64> = (0..16).collect();
    xs.shuffle(rng);
    let mut xs = xs[..n].to_vec();
    xs.sort();
    let mut ys: Vec<i64> = (0..16).collect();
    ys.shuffle(rng);
    let mut ys = ys[..n].to_vec();
    ys.sort();
    let offset = rng.gen_range(0..16);
    let knots = xs
        .into_iter()
        .zip(ys)
        .map(|(x, y)| (q(x, 16), q(y + offset, 16)))
        .collect();
    PlCircleMap::new(knots).expect("sorted dyadic knots")
}

fn random_space<R: Rng>(kind: SpaceKind, rng: &mut R) -> Space {
    match kind {
        SpaceKind::Circle => Space::circle(),
        SpaceKind::Annulus => Space::annulus(),
        SpaceKind::CircleTimesCompactifiedLine => Space::compactified_torus(),
        SpaceKind::Torus2 => loop {
            let (a, b) = (rng.gen_range(-3..=3), rng.gen_range(-3..=3));
            if (a, b) != (0, 0) {
                break Space::torus2(a, b);
            }
        },
    }
}

/// A random map from one of the built-in families available on `space`.
fn random_homeo_on<R: Rng>(space: &Space, rng: &mut R) -> Homeo {
    let small = |rng: &mut R| q(rng.gen_range(-12..=12), rng.gen_range(1..=8));
    match space.kind() {
        SpaceKind::Circle => match rng.gen_range(0..3) {
            0 => Homeo::rigid_rotation(space, small(rng)),
            // strong gradient flows squeeze orbits below f64 resolution
            1 => Homeo::gradient_time_one(space, q(rng.gen_range(-4..=4), 16)),
            _ => Homeo::pl(space, random_pl(rng)),
        },
        SpaceKind::Annulus => Homeo::annulus_twist(space, small(rng), small(rng)),
        SpaceKind::CircleTimesCompactifiedLine => Homeo::torus_shear(space, rng.gen_range(-3..=3)),
        SpaceKind::Torus2 => {
            if rng.gen_bool(0.5) {
                Homeo::torus_bump(space, small(rng))
            } else {
                Homeo::torus_translation(space, small(rng), small(rng))
            }
        }
    }
    .expect("family matches its space")
}

fn random_homeo<R: Rng>(rng: &mut R) -> Homeo {
    let kind = SpaceKind::ALL[rng.gen_range(0..SpaceKind::ALL.len())];
    let space = random_space(kind, rng);
    random_homeo_on(&space, rng)
}

fn shear() -> Homeo {
    Homeo::torus_shear(&Space::compactified_torus(), 1).unwrap()
}

fn torus_example() -> Check {
    let g = shear();
    let mut rng = sampling::rng(1001);
    let mut worst_k = 0.0f64;
    for _ in 0..100 {
        let p = Point::new(rng.gen(), rng.gen_range(-30.0..30.0));
        for n in -20i64..=20 {
            let expect = (p.t + n as f64).abs() - p.t.abs();
            worst_k = worst_k.max((k_power(&g, &p, n).unwrap() - expect).abs());
        }
    }
    let origin = Point::new(0.0, 0.0);
    let mut worst_g = 0.0f64;
    let mut worst_inf = 0.0f64;
    let far: Vec<Point> = (0..10)
        .map(|_| Point::new(rng.gen(), f64::INFINITY))
        .collect();
    for m in -20i64..=20 {
        for n in -20i64..=20 {
            let expect = ((m + n).abs() - m.abs() - n.abs()) as f64;
            worst_g = worst_g.max((g_cocycle_powers(&origin, &g, m, n).unwrap() - expect).abs());
            for p in &far {
                worst_inf = worst_inf.max(g_cocycle_powers(p, &g, m, n).unwrap().abs());
            }
        }
    }
    let tol = 1e-12;
    check(
        worst_k <= tol && worst_g <= tol && worst_inf <= tol,
        format!("max K error {worst_k:e}, max G error {worst_g:e}, max |G at infinity| {worst_inf:e} (tol {tol:e})"),
    )
}

fn cocycle_identity() -> Check {
    let mut rng = sampling::rng(1002);
    let mut worst = 0.0f64;
    for i in 0..200 {
        let g = random_homeo(&mut rng);
        let h = random_homeo_on(g.space(), &mut rng);
        worst = worst.max(k_identity_residual(&g, &h, 1000, 5000 + i).unwrap());
    }
    let tol = 1e-9;
    check(
        worst <= tol,
        format!("max residual {worst:e} over 200 pairs x 1000 points (tol {tol:e})"),
    )
}

fn random_polyline<R: Rng>(space: &Space, closed: bool, rng: &mut R) -> Path {
    let n = rng.gen_range(2..=5);
    let mut vertices: Vec<Point> = (0..n).map(|_| space.sample_point(rng)).collect();
    if closed {
        vertices.push(vertices[0]);
    }
    let windings = (1..vertices.len())
        .map(|_| {
            let w1 = if space.kind().second_is_circle() {
                rng.gen_range(-2..=2)
            } else {
                0
            };
            [rng.gen_range(-2..=2), w1]
        })
        .collect();
    Path::new(vertices, windings).unwrap()
}

fn roundtrip() -> Check {
    let mut rng = sampling::rng(1003);
    let spaces = [
        Space::circle(),
        Space::annulus(),
        Space::torus2(2, -3),
        Space::compactified_torus(),
    ];
    let (mut worst_round, mut worst_loop) = (0.0f64, 0.0f64);
    for space in &spaces {
        let s2 = space.clone();
        let c = PathIntegralCocycle::perturbed(space, space.class_pairing(), "bump", move |p| {
            let u = s2.angles(p);
            0.3 * (2.0 * std::f64::consts::PI * u[0]).sin()
                + 0.2 * (2.0 * std::f64::consts::PI * u[1]).cos()
        });
        let base = CoverPoint::new(space.sample_point(&mut rng), 0.0);
        let back = cocycle_from_potential(space, &potential_from_cocycle(space, &c, base).unwrap());
        for _ in 0..100 {
            let path = random_polyline(space, false, &mut rng);
            let d = c.integrate(&path).unwrap() - back.integrate(&path).unwrap();
            worst_round = worst_round.max(d.abs());
            let lp = random_polyline(space, true, &mut rng);
            let v = c.integrate(&lp).unwrap();
            worst_loop = worst_loop.max((v - v.round()).abs());
        }
    }
    let tol = 1e-9;
    check(
        worst_round <= tol && worst_loop <= tol,
        format!("max roundtrip gap {worst_round:e}, max loop distance to Z {worst_loop:e} (tol {tol:e})"),
    )
}

fn defect_bound() -> Check {
    let mut rng = sampling::rng(1004);
    let (mut ok, mut worst_slack, mut worst_recompute) = (true, f64::INFINITY, 0.0f64);
    for _ in 0..50 {
        let g = random_homeo(&mut rng);
        let x = g.space().sample_point(&mut rng);
        let y = g.space().sample_point(&mut rng);
        let d = defect_estimate(&x, &y, &g, 16).unwrap();
        // recompute the sampled defect from q directly
        let qs: Vec<f64> = (-32..=32)
            .map(|n| q_value(&x, &y, &g, n).unwrap())
            .collect();
        let qv = |n: i64| qs[(n + 32) as usize];
        let mut sampled = 0.0f64;
        for m in -16..=16 {
            for n in -16..=16 {
                sampled = sampled.max((qv(m) - qv(m + n) + qv(n)).abs());
            }
        }
        worst_recompute = worst_recompute.max((sampled - d.sampled).abs());
        let slack = d.norm_x + d.norm_y + 1e-9 - sampled;
        worst_slack = worst_slack.min(slack);
        ok &= slack >= 0.0;
    }
    check(
        ok && worst_recompute <= 1e-9,
        format!("min slack (bound + 1e-9 - defect) {worst_slack:e}, estimator vs recomputed {worst_recompute:e}"),
    )
}

fn classical_oracle(f: &PlCircleMap, x: f64, n: usize) -> f64 {
    let mut y = x;
    for _ in 0..n {
        y = f.eval_f64(y);
    }
    ((y - x) / n as f64).rem_euclid(1.0)
}

fn rotation_numbers() -> Check {
    let c = Space::circle();
    let mut notes = Vec::new();
    let mut ok = true;
    let grad = Homeo::gradient_time_one(&c, q(1, 4)).unwrap();
    let pl_fixed = Homeo::pl(
        &c,
        PlCircleMap::new(vec![
            (q(0, 1), q(1, 16)),
            (q(1, 4), q(1, 4)),
            (q(5, 8), q(13, 16)),
        ])
        .unwrap(),
    )
    .unwrap();
    for (g, x) in [(&grad, 0.0), (&grad, 0.5), (&pl_fixed, 0.25)] {
        let est = local_rotation_number(&Point::circle(x), g, 1 << 12).unwrap();
        ok &= est.rot == 0.0 && est.r == 0.0;
    }
    notes.push(format!("fixed points exact: {ok}"));
    let mut rigid_ok = true;
    for rho in [q(2, 7), &Surd::sqrt(2) - &Surd::one(), q(-3, 5)] {
        let g = Homeo::rigid_rotation(&c, rho.clone()).unwrap();
        let est = local_rotation_number(&Point::circle(0.6), &g, 1 << 12).unwrap();
        rigid_ok &= est.r == -rho.to_f64() && est.residual_band == 0.0;
    }
    notes.push(format!("rigid r = -rho with zero band: {rigid_ok}"));
    let mut rng = sampling::rng(1005);
    let h = random_pl(&mut rng);
    let f = h
        .compose(&PlCircleMap::rotation(q(2, 5)))
        .compose(&h.inverse());
    let g = Homeo::pl(&c, f.clone()).unwrap();
    let mut worst = 0.0f64;
    let mut worst_sign = 0.0f64;
    for x in [0.0, 0.3, 0.77] {
        let est = local_rotation_number(&Point::circle(x), &g, 10_000).unwrap();
        let oracle = classical_oracle(&f, x, 10_000);
        worst = worst.max(circular_distance(est.classical, oracle));
        // reported rot is the negated class
        worst_sign = worst_sign.max(circular_distance(est.rot, -oracle));
    }
    notes.push(format!(
        "conjugate of 2/5 at N = 1e4: |classical - oracle| {worst:e}, |rot + oracle| {worst_sign:e} (tol 1e-3)"
    ));
    check(
        ok && rigid_ok && worst <= 1e-3 && worst_sign <= 1e-3,
        notes.join(", "),
    )
}

fn certificates() -> Check {
    let a = Space::annulus();
    let t = Homeo::annulus_twist(&a, Surd::zero(), q(1, 2)).unwrap();
    let set = GenSet::new(vec![("T".into(), t.clone())], DEFAULT_SEMINORM_LEVEL).unwrap();
    let c = set.constant();
    let by_rotation = certify_two_rotation_points(
        &Point::new(0.0, 0.0),
        &Point::new(0.0, 1.0),
        &t,
        1 << 12,
        Some(c),
    )
    .unwrap();
    let by_measures = certify_two_measures(
        &Measure::circle(&a, InvariantCircle::Boundary(0)).unwrap(),
        &Measure::circle(&a, InvariantCircle::Boundary(1)).unwrap(),
        &t,
        Some(c),
    )
    .unwrap();
    let tol = 1e-6;
    let good = |cert: &undistort::Certificate, m: Mechanism| {
        cert.verdict == Verdict::Undistorted
            && cert.mechanism == m
            && (cert.tau_lower_bound - 1.0).abs() <= tol
    };
    let g = shear();
    let origin = Point::new(0.0, 0.0);
    let shear_cert =
        certify_two_rotation_points(&origin, &Point::new(0.0, f64::INFINITY), &g, 1 << 10, None)
            .unwrap();
    let shear_rot = local_rotation_number(&origin, &g, 1 << 10).unwrap();
    let pass = (c - 0.5).abs() <= 1e-12
        && good(&by_rotation, Mechanism::TwoRotationPoints)
        && good(&by_measures, Mechanism::TwoMeasures)
        && shear_cert.verdict == Verdict::Inconclusive
        && shear_rot.bounded_verdict == BoundedVerdict::UnboundedSuspected;
    check(
        pass,
        format!(
            "C = {c:?}, tau by rotation {:?}, tau by measures {:?} (tol {tol:e}), shear {} with {}",
            by_rotation.tau_lower_bound,
            by_measures.tau_lower_bound,
            shear_cert.verdict,
            shear_rot.bounded_verdict
        ),
    )
}

fn peak_memory_mb() -> Option<f64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: f64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb / 1024.0)
}

fn taxicab(r: i64) -> usize {
    (-r..=r)
        .flat_map(|a| (-r..=r).map(move |b| (a, b)))
        .filter(|(a, b)| a.abs() + b.abs() <= r)
        .count()
}

fn word_geometry() -> Check {
    let c = Space::circle();
    let pl = |data: &[(i64, i64)]| {
        let knots = data.iter().map(|&(x, y)| (q(x, 16), q(y, 16))).collect();
        Homeo::pl(&c, PlCircleMap::new(knots).unwrap()).unwrap()
    };
    let p = pl(&[(0, 0), (4, 2), (8, 8)]);
    let qq = pl(&[(0, 0), (8, 8), (12, 10)]);
    let set = GenSet::new(
        vec![("p".into(), p), ("q".into(), qq)],
        DEFAULT_SEMINORM_LEVEL,
    )
    .unwrap();
    let sizes = ball(&set, 3, 1_000_000).unwrap().sizes;
    let oracle: Vec<usize> = (0..=3).map(taxicab).collect();
    let t = Homeo::annulus_twist(&Space::annulus(), Surd::zero(), q(1, 2)).unwrap();
    let tset = GenSet::new(vec![("T".into(), t.clone())], DEFAULT_SEMINORM_LEVEL).unwrap();
    let mut norms_ok = true;
    let mut pairs = Vec::new();
    for n in 1..=6 {
        let w = word_norm(&t.power(n).unwrap(), &tset, 6, 1_000_000).unwrap();
        norms_ok &= w.exact == Some(n as usize) && (w.lower_bound - n as f64).abs() <= 1e-9;
        pairs.push(format!(
            "{}/{:?}",
            w.exact.map_or("-".into(), |e| e.to_string()),
            w.lower_bound
        ));
    }
    let mem = peak_memory_mb();
    let mem_ok = mem.is_none_or(|m| m < 1024.0);
    check(
        sizes == oracle && norms_ok && mem_ok,
        format!(
            "ball sizes {sizes:?} vs taxicab {oracle:?}, |T^n| exact/lower for n = 1..6: {}, peak memory {} (limit 1024 MB)",
            pairs.join(" "),
            mem.map_or("unknown".into(), |m| format!("{m:.0} MB"))
        ),
    )
}

fn determinism() -> Check {
    let scenario = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios/acceptance.scn");
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let status = Command::new(env!("CARGO_BIN_EXE_undistort"))
            .arg("run")
            .arg(&scenario)
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap();
        assert_eq!(
            status.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&status.stderr)
        );
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(&out)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (
                    e.file_name().to_string_lossy().into_owned(),
                    std::fs::read(e.path()).unwrap(),
                )
            })
            .collect();
        files.sort();
        outputs.push((status.stdout, files));
    }
    let same = outputs[0] == outputs[1];
    let bytes: usize = outputs[0].1.iter().map(|(_, b)| b.len()).sum();
    check(
        same,
        format!(
            "two runs, {} files ({bytes} bytes) plus stdout, identical: {same}",
            outputs[0].1.len()
        ),
    )
}

fn main() {
    let results = [
        criterion(1, "torus example exactness", Some(1.0), torus_example),
        criterion(2, "cocycle identity", Some(10.0), cocycle_identity),
        criterion(3, "cocycle/potential roundtrip", None, roundtrip),
        criterion(4, "defect bound", None, defect_bound),
        criterion(5, "rotation numbers", None, rotation_numbers),
        criterion(6, "undistortion certificates", Some(5.0), certificates),
        criterion(7, "word geometry", Some(60.0), word_geometry),
        criterion(8, "determinism", None, determinism),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
