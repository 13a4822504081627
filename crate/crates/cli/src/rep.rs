//! Named represented groups for the `tripling` command.

use stabreg_core::repgroup::{Heisenberg, HeisenbergMod, IntegerLattice, LatticeTimesFinite};
use stabreg_core::{Caps, Error, FiniteGroup, Result};

use crate::spec::load_group;

pub enum AnyRep {
    Finite(FiniteGroup),
    Lattice(IntegerLattice),
    LatticeFinite(LatticeTimesFinite),
    Heisenberg(Heisenberg),
    HeisenbergMod(HeisenbergMod),
}

fn lattice_dim(s: &str) -> Option<usize> {
    match s {
        "Z" => Some(1),
        _ => s.strip_prefix("Z^").and_then(|d| d.parse().ok()).filter(|&d| d > 0),
    }
}

/// `Z`, `Z^d`, `Z^dx<finite>` (or `Zx<finite>`), `H(Z)`, `H(Z/n)`, or any
/// finite group spec.
pub fn parse_rep(spec: &str, caps: &Caps) -> Result<AnyRep> {
    let spec = spec.trim();
    if spec == "H(Z)" {
        return Ok(AnyRep::Heisenberg(Heisenberg));
    }
    if let Some(n) = spec.strip_prefix("H(Z/").and_then(|r| r.strip_suffix(')')) {
        let n: i64 = n.parse().map_err(|_| Error::Parse(format!("bad modulus in {spec:?}")))?;
        return Ok(AnyRep::HeisenbergMod(HeisenbergMod::new(n)?));
    }
    if let Some(dim) = lattice_dim(spec) {
        return Ok(AnyRep::Lattice(IntegerLattice { dim }));
    }
    if let Some((head, tail)) = spec.split_once('x') {
        if let Some(dim) = lattice_dim(head) {
            let finite = load_group(tail, caps)?;
            return Ok(AnyRep::LatticeFinite(LatticeTimesFinite { dim, finite }));
        }
    }
    Ok(AnyRep::Finite(load_group(spec, caps)?))
}
