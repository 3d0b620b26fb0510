//! Generators for extremal and random labellings.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupElement, GroupSpec};
use crate::labelling::{Labelling, MAX_VERTICES};

/// `Z_q` on `n` vertices with label 1 on increasing arcs (`u < v`) and 0 on
/// decreasing arcs.
///
/// Every cycle uses between 1 and `n - 1` increasing arcs, so there is no
/// balanced cycle for `n ≤ q`; at `n = q + 1` the increasing Hamiltonian cycle
/// is the only one.
pub fn extremal_cyclic(q: usize, n: usize) -> Result<Labelling> {
    if q < 2 || !(2..=MAX_VERTICES).contains(&n) {
        return Err(Error::BadSize(format!(
            "extremal construction needs q ≥ 2 and 2 ≤ n ≤ 64, got q={q}, n={n}"
        )));
    }
    let group = Arc::new(GroupSpec::cyclic(q).build()?);
    Labelling::from_fn(group, n, |u, v| GroupElement::new(usize::from(u < v)))
}

/// The arcs of the unique balanced cycle of `extremal_cyclic(q, q + 1)`:
/// arc `k` is `(k, k + 1)` for `k < q` and arc `q` is `(q, 0)`.
pub fn critical_arc(q: usize, k: usize) -> (usize, usize) {
    if k < q {
        (k, k + 1)
    } else {
        (q, 0)
    }
}

/// `extremal_cyclic(q, q + 1)` with arc `k` of its balanced cycle removed.
pub fn arc_critical_instance(q: usize, deleted_arc: usize) -> Result<Labelling> {
    if deleted_arc > q {
        return Err(Error::BadIndex(format!("arc index {deleted_arc} outside 0..={q}")));
    }
    let base = extremal_cyclic(q, q + 1)?;
    let (u, v) = critical_arc(q, deleted_arc);
    base.without_arc(u, v)
}

/// Complete labelling with independent uniform labels.
///
/// The generator is Xoshiro256++ seeded through `seed_from_u64`; labels are
/// drawn with `gen_range(0..order)` in row-major order over the off-diagonal
/// arcs. The output is identical on every platform for a given
/// `(group, n, seed)`.
pub fn random_labelling(group: &Arc<FiniteGroup>, n: usize, seed: u64) -> Result<Labelling> {
    if !(2..=MAX_VERTICES).contains(&n) {
        return Err(Error::BadSize(format!("random labelling needs 2 ≤ n ≤ 64, got {n}")));
    }
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let order = group.order();
    Labelling::from_fn(Arc::clone(group), n, |_, _| GroupElement::new(rng.gen_range(0..order)))
}
