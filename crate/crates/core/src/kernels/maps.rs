use serde::Serialize;

use super::bounds::BoundTable;
use crate::diffpoly::{unit_index, DerIndet};
use crate::error::{Error, Result};
use crate::prolong::gamma_set;

/// π, ψ and φ as index tables over Γ_n(C), C = C^n_{1,m}.
///
/// Each table lists, for every target slot, the position of the source
/// coordinate in `source` (which is Γ_n(C) in ranking order).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexMaps {
    pub n: usize,
    pub m: usize,
    pub c: u32,
    pub source: Vec<DerIndet>,
    /// Γ_n(C − 1), the target of π and the slot layout of each φ block.
    pub truncated: Vec<DerIndet>,
    pub pi: Vec<usize>,
    pub psi: Vec<usize>,
    /// m + 1 blocks of |Γ_n(C − 1)| slots: block 0 is π, block k shifts by e_k.
    pub phi: Vec<usize>,
}

impl IndexMaps {
    pub fn apply<T: Clone>(table: &[usize], point: &[T]) -> Vec<T> {
        table.iter().map(|&s| point[s].clone()).collect()
    }

    pub fn phi_is_injective(&self) -> bool {
        let mut hit = vec![false; self.source.len()];
        for &s in &self.phi {
            hit[s] = true;
        }
        hit.into_iter().all(|h| h)
    }
}

pub fn index_maps(table: &BoundTable, n: usize, m: usize) -> Result<IndexMaps> {
    if n == 0 || m == 0 {
        return Err(Error::BadIndex(format!("index maps need n, m ≥ 1 (got n = {}, m = {})", n, m)));
    }
    let c = table.c(n as u64, 1, m as u64)?;
    let c = u32::try_from(c).map_err(|_| Error::BadBound(format!("bound {} too large to enumerate", c)))?;
    let source = gamma_set(n, m, c)?;
    let pos = |v: &DerIndet| source.binary_search(v).expect("coordinate lies in Γ_n(C)");
    let truncated = gamma_set(n, m, c - 1)?;
    let pi: Vec<usize> = truncated.iter().map(pos).collect();
    let psi: Vec<usize> = gamma_set(n, m, 1)?.iter().map(pos).collect();
    let mut phi = pi.clone();
    for k in 0..m {
        let e = unit_index(m, k);
        phi.extend(truncated.iter().map(|v| pos(&v.shifted(&e))));
    }
    Ok(IndexMaps { n, m, c, source, truncated, pi, psi, phi })
}
