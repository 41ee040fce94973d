//! The `list-families` catalog.

use std::fmt::Write as _;

use crate::scenario::ANALYSES;

const SPACES: [(&str, &str, &str); 4] = [
    ("Circle", "class = a", "s in [0,1)"),
    ("Annulus", "class = a", "s in [0,1), r in [0,1]"),
    ("Torus2", "class = a, b", "s, t in [0,1)"),
    (
        "CircleTimesCompactifiedLine",
        "class = a, b",
        "t in [0,1), x real or inf",
    ),
];

const FAMILIES: [(&str, &str, &str, &str); 8] = [
    ("RigidRotation", "Circle", "rho", "s -> s + rho"),
    (
        "AnnulusTwist",
        "Annulus",
        "inner, outer",
        "(s, r) -> (s + (1-r)*inner + r*outer, r)",
    ),
    (
        "TorusShear",
        "CircleTimesCompactifiedLine",
        "power = 1",
        "g^power for g(t, x) = (t + |x+1| - |x|, x + 1), g(t, inf) = (t, inf)",
    ),
    (
        "TorusBump",
        "Torus2",
        "amplitude",
        "(s, t) -> (s + amplitude*(1 - cos 2 pi t)/2, t)",
    ),
    (
        "TorusTranslation",
        "Torus2",
        "a, b",
        "(s, t) -> (s + a, t + b)",
    ),
    (
        "GradientTimeOne",
        "Circle",
        "strength",
        "tan(pi s) -> exp(-2 pi strength) tan(pi s)",
    ),
    (
        "PL",
        "Circle",
        "knots = x:y, ...",
        "piecewise linear circle map through the knots",
    ),
    ("Identity", "any", "", "the identity"),
];

pub fn catalog() -> String {
    let mut out = String::new();
    let _ = writeln!(out, "spaces ([space NAME] kind = ...):");
    for (name, class, coords) in SPACES {
        let _ = writeln!(out, "  {name:<29} {class:<14} {coords}");
    }
    let _ = writeln!(out, "\nfamilies ([homeo NAME] family = ...):");
    for (name, space, params, formula) in FAMILIES {
        let _ = writeln!(out, "  {name:<17} on {space:<28} [{params}]");
        let _ = writeln!(out, "  {:<17}    {formula}", "");
    }
    let _ = writeln!(out, "\ncombinators ([homeo NAME] without family):");
    let _ = writeln!(out, "  compose = a, b, ...          a after b after ...");
    let _ = writeln!(out, "  inverse = a");
    let _ = writeln!(out, "  of = a, power = n");
    let _ = writeln!(
        out,
        "  of = a, sampled = resolution  grid-sampled approximation"
    );
    let _ = writeln!(out, "\nmeasures ([measure NAME] kind = ...):");
    let _ = writeln!(out, "  circle     space, circle = base | boundary:0 | boundary:1 | infinity | s-circle:t | t-circle:s");
    let _ = writeln!(out, "  atoms      space, points = x, ..., weights = w, ...");
    let _ = writeln!(out, "  empirical  homeo, start, length");
    let _ = writeln!(out, "\nanalyses ([analysis TYPE], optional id):");
    for (name, keys) in ANALYSES {
        let _ = writeln!(out, "  {name:<17} {keys}");
    }
    out
}
