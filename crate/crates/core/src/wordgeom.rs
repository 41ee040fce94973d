//! Word norms over finite symmetric generating sets of exactly representable
//! maps, Cayley-ball enumeration and translation-length sandwiches.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::certificate::Certificate;
use crate::cocycle::seminorm;
use crate::error::{Error, Result};
use crate::homeo::{Canonical, Homeo};

/// Default grid level for generator seminorms.
pub const DEFAULT_SEMINORM_LEVEL: u32 = 8;
/// Default cap on the number of enumerated ball elements.
pub const DEFAULT_NODE_CAP: usize = 10_000_000;
/// Environment variable overriding [`DEFAULT_NODE_CAP`].
pub const NODE_CAP_ENV: &str = "UNDISTORT_NODE_CAP";

/// Node cap from the environment, falling back to the default.
pub fn node_cap_from_env() -> usize {
    std::env::var(NODE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_NODE_CAP)
}

/// A symmetric generating set: each supplied generator `s` is followed by
/// `s⁻¹` (named `s^-1`).
#[derive(Clone, Debug)]
pub struct GenSet {
    names: Vec<String>,
    generators: Vec<Homeo>,
    seminorms: Vec<f64>,
    constant: f64,
}

impl GenSet {
    pub fn new(named: Vec<(String, Homeo)>, level: u32) -> Result<GenSet> {
        if named.is_empty() {
            return Err(Error::Domain("empty generating set".into()));
        }
        let space = named[0].1.space().clone();
        let mut names = Vec::new();
        let mut generators = Vec::new();
        for (name, g) in named {
            if *g.space() != space {
                return Err(Error::SpaceMismatch {
                    left: space.describe(),
                    right: g.space().describe(),
                });
            }
            if g.canonical().is_none() {
                return Err(Error::UnsupportedFlavor(format!(
                    "generator {name} = {} has no exact normal form",
                    g.describe()
                )));
            }
            let inv = g.inverse()?;
            names.push(name.clone());
            generators.push(g);
            names.push(format!("{name}^-1"));
            generators.push(inv);
        }
        let seminorms = generators
            .iter()
            .map(|g| seminorm(g, level).map(|s| s.value))
            .collect::<Result<Vec<f64>>>()?;
        let constant = seminorms.iter().copied().fold(0.0, f64::max);
        Ok(GenSet {
            names,
            generators,
            seminorms,
            constant,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn generators(&self) -> &[Homeo] {
        &self.generators
    }

    pub fn seminorms(&self) -> &[f64] {
        &self.seminorms
    }

    /// `C = max_s ‖s‖`.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Product `s_{w₀} ∘ s_{w₁} ∘ …` of a word.
    pub fn eval(&self, word: &[usize]) -> Result<Homeo> {
        let mut acc = Homeo::identity(self.generators[0].space());
        for &i in word {
            acc = acc.compose(&self.generators[i])?;
        }
        Ok(acc)
    }

    pub fn word_string(&self, word: &[usize]) -> String {
        if word.is_empty() {
            return "e".into();
        }
        word.iter()
            .map(|&i| self.names[i].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Clone, Debug)]
pub struct BallNode {
    pub canonical: Canonical,
    pub length: usize,
    /// First minimal word found, as generator indices.
    pub witness: Vec<usize>,
    pub element: Homeo,
}

#[derive(Clone, Debug)]
pub struct Ball {
    pub radius: usize,
    /// Nodes in order of discovery (by length, then witness).
    pub nodes: Vec<BallNode>,
    /// Number of elements of word length `≤ r` for `r = 0..=radius`.
    pub sizes: Vec<usize>,
    pub truncated: bool,
    index: HashMap<Canonical, usize>,
}

impl Ball {
    pub fn lookup(&self, c: &Canonical) -> Option<&BallNode> {
        self.index.get(c).map(|&i| &self.nodes[i])
    }

    pub fn norm_of(&self, g: &Homeo) -> Option<usize> {
        g.canonical()
            .and_then(|c| self.lookup(&c))
            .map(|n| n.length)
    }
}

/// Breadth-first enumeration of the ball of radius `radius`.
///
/// Each frontier is extended on the right by every generator in index order;
/// candidates are computed in parallel and merged sequentially, so the first
/// witness of each element is the same on every run.
pub fn ball(set: &GenSet, radius: usize, node_cap: usize) -> Result<Ball> {
    let space = set.generators[0].space().clone();
    let identity = Homeo::identity(&space);
    let root = identity.canonical().expect("identity has a normal form");
    let mut nodes = vec![BallNode {
        canonical: root.clone(),
        length: 0,
        witness: Vec::new(),
        element: identity,
    }];
    let mut index = HashMap::new();
    index.insert(root, 0usize);
    let mut sizes = vec![1];
    let mut truncated = false;
    let mut frontier: Vec<usize> = vec![0];
    for length in 1..=radius {
        if truncated {
            break;
        }
        let candidates: Vec<Vec<(Canonical, Homeo)>> = frontier
            .par_iter()
            .map(|&i| {
                let base = &nodes[i].element;
                set.generators
                    .iter()
                    .map(|s| {
                        let h = base.compose(s)?;
                        let c = h.canonical().ok_or_else(|| {
                            Error::UnsupportedFlavor(format!(
                                "product {} left the exact families",
                                h.describe()
                            ))
                        })?;
                        Ok((c, h))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mut next = Vec::new();
        'merge: for (&parent, row) in frontier.iter().zip(candidates) {
            for (gen, (c, h)) in row.into_iter().enumerate() {
                if index.contains_key(&c) {
                    continue;
                }
                if nodes.len() >= node_cap {
                    truncated = true;
                    break 'merge;
                }
                let mut witness = nodes[parent].witness.clone();
                witness.push(gen);
                index.insert(c.clone(), nodes.len());
                next.push(nodes.len());
                nodes.push(BallNode {
                    canonical: c,
                    length,
                    witness,
                    element: h,
                });
            }
        }
        sizes.push(nodes.len());
        frontier = next;
    }
    Ok(Ball {
        radius,
        nodes,
        sizes,
        truncated,
        index,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct WordNorm {
    /// `|g|` when `g` lies in the enumerated ball.
    pub exact: Option<usize>,
    pub witness: Option<Vec<usize>>,
    /// `‖g‖ / C`.
    pub lower_bound: f64,
    pub seminorm: f64,
    pub truncated: bool,
}

pub fn word_norm(g: &Homeo, set: &GenSet, radius: usize, node_cap: usize) -> Result<WordNorm> {
    let b = ball(set, radius, node_cap)?;
    word_norm_in(g, set, &b)
}

pub fn word_norm_in(g: &Homeo, set: &GenSet, b: &Ball) -> Result<WordNorm> {
    let sn = seminorm(g, DEFAULT_SEMINORM_LEVEL)?.value;
    let node = g.canonical().and_then(|c| b.lookup(&c));
    Ok(WordNorm {
        exact: node.map(|n| n.length),
        witness: node.map(|n| n.witness.clone()),
        lower_bound: if set.constant() > 0.0 {
            sn / set.constant()
        } else {
            0.0
        },
        seminorm: sn,
        truncated: b.truncated,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TranslationLength {
    /// `(n, |gⁿ|)` for every power found in the ball.
    pub power_norms: Vec<(usize, usize)>,
    /// `min |gⁿ|/n` over those powers.
    pub upper: Option<f64>,
    /// Largest certified lower bound, converted to the word metric of `S`.
    pub lower: f64,
    pub truncated: bool,
}

/// Largest power examined by [`translation_length`].
pub const MAX_POWER: usize = 64;

pub fn translation_length(
    g: &Homeo,
    set: &GenSet,
    radius: usize,
    node_cap: usize,
    certificates: &[Certificate],
) -> Result<TranslationLength> {
    let b = ball(set, radius, node_cap)?;
    let mut power_norms = Vec::new();
    let mut gn = g.clone();
    for n in 1..=MAX_POWER {
        match b.norm_of(&gn) {
            Some(len) => power_norms.push((n, len)),
            None => break,
        }
        gn = gn.compose(g)?;
    }
    let upper = power_norms
        .iter()
        .map(|&(n, len)| len as f64 / n as f64)
        .reduce(f64::min);
    let lower = if set.constant() > 0.0 {
        certificates
            .iter()
            .filter(|c| c.is_undistorted())
            .map(|c| c.seminorm_units_bound() / set.constant())
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    Ok(TranslationLength {
        power_norms,
        upper,
        lower,
        truncated: b.truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Surd;
    use crate::space::Space;

    fn rotation_set(rho: Surd) -> GenSet {
        let c = Space::circle();
        GenSet::new(
            vec![("r".into(), Homeo::rigid_rotation(&c, rho).unwrap())],
            4,
        )
        .unwrap()
    }

    #[test]
    fn finite_cyclic_ball() {
        let set = rotation_set(Surd::ratio(1, 3));
        let b = ball(&set, 5, 1000).unwrap();
        assert_eq!(b.sizes, vec![1, 3, 3, 3, 3, 3]);
    }

    #[test]
    fn infinite_cyclic_ball() {
        let set = rotation_set(&Surd::sqrt(2) - &Surd::one());
        let b = ball(&set, 4, 1000).unwrap();
        assert_eq!(b.sizes, vec![1, 3, 5, 7, 9]);
    }

    #[test]
    fn cap_truncates() {
        let set = rotation_set(&Surd::sqrt(2) - &Surd::one());
        let b = ball(&set, 10, 4).unwrap();
        assert!(b.truncated);
        assert_eq!(b.nodes.len(), 4);
    }

    #[test]
    fn lazy_generators_rejected() {
        let c = Space::circle();
        let g = Homeo::gradient_time_one(&c, Surd::ratio(1, 2))
            .unwrap()
            .compose(&Homeo::rigid_rotation(&c, Surd::ratio(1, 2)).unwrap())
            .unwrap();
        assert!(matches!(
            GenSet::new(vec![("g".into(), g)], 4),
            Err(Error::UnsupportedFlavor(_))
        ));
    }

    #[test]
    fn torsion_has_zero_translation_length() {
        let set = rotation_set(Surd::ratio(1, 3));
        let g = set.generators()[0].clone();
        let t = translation_length(&g, &set, 4, 1000, &[]).unwrap();
        assert_eq!(t.upper, Some(0.0));
        assert_eq!(t.lower, 0.0);
    }
}
