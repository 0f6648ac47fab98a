//! Named graph families accepted by `--family`.

use std::str::FromStr;

use sawlab::grigorchuk::{cayley_ball, schreier_ball};
use sawlab::lattices::{build_free_product, build_ladder, build_periodic, build_tree, build_twisted_ladder, FreeProductSpec};
use sawlab::tlf::{generate_tiling, TypeVector};
use sawlab::{GraphBall, PHI};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    Tree(usize),
    Ladder,
    TwistedLadder,
    Periodic(&'static str),
    FreeProduct(FreeProductSpec),
    Tiling(TypeVector),
    Grigorchuk,
    Schreier,
}

pub const NAMES: &str = "tree[:d], ladder, twisted_ladder, hexagonal, arch_4_8_8, arch_4_6_12, \
free_product:d,g, tiling:k1,k2,k3, grigorchuk, schreier";

impl FromStr for Family {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = || CliError::Config(format!("unknown family `{s}`; expected one of {NAMES}"));
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let ints = |a: &str| -> Result<Vec<usize>, CliError> {
            a.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
        };
        Ok(match (name, arg) {
            ("tree", None) => Family::Tree(3),
            ("tree", Some(a)) => match ints(a)?[..] {
                [d] => Family::Tree(d),
                _ => return Err(bad()),
            },
            ("ladder", None) => Family::Ladder,
            ("twisted_ladder", None) => Family::TwistedLadder,
            ("hexagonal", None) => Family::Periodic("hexagonal"),
            ("arch_4_8_8", None) => Family::Periodic("arch_4_8_8"),
            ("arch_4_6_12", None) => Family::Periodic("arch_4_6_12"),
            ("free_product", Some(a)) => match ints(a)?[..] {
                [d, g] => Family::FreeProduct(FreeProductSpec { d, g }),
                _ => return Err(bad()),
            },
            ("tiling", Some(a)) => Family::Tiling(a.parse().map_err(CliError::from)?),
            ("grigorchuk", None) => Family::Grigorchuk,
            ("schreier", None) => Family::Schreier,
            _ => return Err(bad()),
        })
    }
}

impl Family {
    /// Ball in which every walk of `radius` steps from the root stays
    /// among complete vertices.
    pub fn build(&self, radius: usize) -> Result<GraphBall, CliError> {
        Ok(match self {
            Family::Tree(d) => build_tree(*d, radius)?,
            Family::Ladder => build_ladder(2 * radius + 2, true)?,
            Family::TwistedLadder => build_twisted_ladder(2 * radius + 4)?,
            Family::Periodic(name) => build_periodic(name, radius)?.ball,
            Family::FreeProduct(spec) => build_free_product(*spec, radius)?.0,
            Family::Tiling(tv) => generate_tiling(*tv, radius)?.0,
            Family::Grigorchuk => cayley_ball(radius)?.ball,
            Family::Schreier => schreier_ball(radius)?.to_graph_ball(radius)?,
        })
    }

    /// Known connective constant, where there is one.
    pub fn reference_mu(&self) -> Option<f64> {
        match self {
            Family::Tree(d) => Some(*d as f64 - 1.0),
            Family::Ladder => Some(PHI),
            Family::TwistedLadder => Some((1.0 + 3f64.sqrt()).sqrt()),
            Family::Periodic("hexagonal") => Some((2.0 + 2f64.sqrt()).sqrt()),
            _ => None,
        }
    }

    /// Short tag used in CSV anchors.
    pub fn tag(&self) -> String {
        match self {
            Family::Tree(d) => format!("tree{d}"),
            Family::Ladder => "ladder".into(),
            Family::TwistedLadder => "twisted_ladder".into(),
            Family::Periodic(n) => n.to_string(),
            Family::FreeProduct(s) => format!("free_product_{}_{}", s.d, s.g),
            Family::Tiling(tv) => {
                let [a, b, c] = tv.sizes();
                format!("tiling_{a}_{b}_{c}")
            }
            Family::Grigorchuk => "grigorchuk".into(),
            Family::Schreier => "schreier".into(),
        }
    }
}
