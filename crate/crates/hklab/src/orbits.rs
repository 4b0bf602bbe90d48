//! Combinatorics of the nilpotent orbit correspondence for the general linear
//! algebra: partitions, dominance order, the paired orbit poset, and orbit
//! labelling of matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{jordan_type, CMat, JordanType, Tolerances};

/// Weakly decreasing positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition(pub Vec<usize>);

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::Validation("partition parts must be positive".into()));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Validation("partition parts must be weakly decreasing".into()));
        }
        Ok(Partition(parts))
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    /// Conjugate (transpose) partition.
    pub fn conjugate(&self) -> Partition {
        let max = self.0.first().copied().unwrap_or(0);
        Partition((1..=max).map(|j| self.0.iter().filter(|&&p| p >= j).count()).collect())
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// All partitions of n in lexicographically descending order.
pub fn partitions(n: usize) -> Vec<Partition> {
    fn rec(n: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if n == 0 {
            out.push(Partition(prefix.clone()));
            return;
        }
        for p in (1..=max.min(n)).rev() {
            prefix.push(p);
            rec(n - p, p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n.max(1), &mut Vec::new(), &mut out);
    if n == 0 {
        return vec![Partition(vec![])];
    }
    out
}

/// Dominance order on partitions of equal size: `lhs <= rhs` iff every prefix
/// sum of `lhs` is at most the corresponding prefix sum of `rhs`.
pub fn dominance_leq(lhs: &Partition, rhs: &Partition) -> Result<bool> {
    if lhs.size() != rhs.size() {
        return Err(Error::SizeMismatch { lhs: lhs.size(), rhs: rhs.size() });
    }
    let mut sl = 0usize;
    let mut sr = 0usize;
    let k = lhs.0.len().max(rhs.0.len());
    for i in 0..k {
        sl += lhs.0.get(i).copied().unwrap_or(0);
        sr += rhs.0.get(i).copied().unwrap_or(0);
        if sl > sr {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A finite poset of orbit labels with its full relation matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrbitPoset {
    pub labels: Vec<Partition>,
    pub leq: Vec<Vec<bool>>,
}

impl OrbitPoset {
    pub fn dominance(labels: Vec<Partition>) -> Result<Self> {
        let k = labels.len();
        let mut leq = vec![vec![false; k]; k];
        for i in 0..k {
            for j in 0..k {
                leq[i][j] = dominance_leq(&labels[i], &labels[j])?;
            }
        }
        let poset = OrbitPoset { labels, leq };
        poset.check_axioms()?;
        Ok(poset)
    }

    /// Reflexivity, antisymmetry, transitivity.
    pub fn check_axioms(&self) -> Result<()> {
        let k = self.labels.len();
        for i in 0..k {
            if !self.leq[i][i] {
                return Err(Error::Validation(format!("poset not reflexive at {i}")));
            }
            for j in 0..k {
                if i != j && self.leq[i][j] && self.leq[j][i] {
                    return Err(Error::Validation(format!("poset not antisymmetric at {i},{j}")));
                }
                for l in 0..k {
                    if self.leq[i][j] && self.leq[j][l] && !self.leq[i][l] {
                        return Err(Error::Validation(format!(
                            "poset not transitive at {i},{j},{l}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Covering relations (transitive reduction).
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let k = self.labels.len();
        let mut out = Vec::new();
        for i in 0..k {
            for j in 0..k {
                if i == j || !self.leq[i][j] {
                    continue;
                }
                let mut is_cover = true;
                for l in 0..k {
                    if l != i && l != j && self.leq[i][l] && self.leq[l][j] {
                        is_cover = false;
                        break;
                    }
                }
                if is_cover {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// The paired orbit table: real-orbit labels against symmetric-orbit labels,
/// both given by partitions of n, with the closure (dominance) order. For the
/// general linear algebra the pairing is the identity on partitions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KsTable {
    pub n: usize,
    pub pairs: Vec<(Partition, Partition)>,
    pub poset: OrbitPoset,
}

pub fn ks_table_gl(n: usize) -> Result<KsTable> {
    if n == 0 {
        return Err(Error::Validation("ks table needs n >= 1".into()));
    }
    let labels = partitions(n);
    let pairs = labels.iter().map(|p| (p.clone(), p.clone())).collect();
    let poset = OrbitPoset::dominance(labels)?;
    Ok(KsTable { n, pairs, poset })
}

/// Graphviz rendering of the paired poset's covering relations.
pub fn ks_table_dot(table: &KsTable) -> String {
    let mut s = String::from("digraph orbits {\n  rankdir=BT;\n");
    for (i, (r, sym)) in table.pairs.iter().enumerate() {
        s.push_str(&format!("  n{i} [label=\"{r} | {sym}\", shape=box];\n"));
    }
    for (i, j) in table.poset.covers() {
        s.push_str(&format!("  n{i} -> n{j};\n"));
    }
    s.push_str("}\n");
    s
}

/// Orbit label of a matrix with real spectrum: its Jordan type. For nilpotent
/// input this is the single partition at zero.
pub fn orbit_label(m: &CMat, tol: &Tolerances) -> Result<JordanType> {
    jordan_type(m, tol)
}

/// The partition at zero for a nilpotent matrix; errors if the matrix has a
/// nonzero cluster.
pub fn nilpotent_label(m: &CMat, tol: &Tolerances) -> Result<Partition> {
    let jt = jordan_type(m, tol)?;
    let radius = tol.cluster_for(m).max(1e-9);
    if jt.blocks.len() != 1 || jt.blocks[0].0.abs() > radius {
        return Err(Error::Validation("matrix is not nilpotent".into()));
    }
    Partition::new(jt.blocks[0].1.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use ndarray_linalg::c64;

    #[test]
    fn partitions_counts() {
        assert_eq!(partitions(0).len(), 1);
        assert_eq!(partitions(2), vec![Partition(vec![2]), Partition(vec![1, 1])]);
        assert_eq!(partitions(4).len(), 5);
        assert_eq!(partitions(6).len(), 11);
    }

    #[test]
    fn dominance_examples() {
        let p = |v: &[usize]| Partition(v.to_vec());
        assert!(dominance_leq(&p(&[1, 1]), &p(&[2])).unwrap());
        assert!(dominance_leq(&p(&[2, 2]), &p(&[3, 1])).unwrap());
        assert!(!dominance_leq(&p(&[3, 1]), &p(&[2, 2])).unwrap());
        assert!(matches!(
            dominance_leq(&p(&[2]), &p(&[2, 1])),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn poset_axioms_up_to_six() {
        for n in 1..=6 {
            let t = ks_table_gl(n).unwrap();
            t.poset.check_axioms().unwrap();
            assert_eq!(t.pairs.len(), partitions(n).len());
            for (a, b) in &t.pairs {
                assert_eq!(a, b, "pairing is the identity on partitions");
            }
        }
    }

    #[test]
    fn conjugate_involutive() {
        for n in 1..=6 {
            for p in partitions(n) {
                assert_eq!(p.conjugate().conjugate(), p);
            }
        }
    }

    #[test]
    fn orbit_label_examples() {
        let tol = Tolerances::default();
        let mut j2: CMat = Array2::zeros((2, 2));
        j2[(0, 1)] = c64::new(1.0, 0.0);
        assert_eq!(nilpotent_label(&j2, &tol).unwrap(), Partition(vec![2]));
        let z3: CMat = Array2::zeros((3, 3));
        assert_eq!(nilpotent_label(&z3, &tol).unwrap(), Partition(vec![1, 1, 1]));
        // symmetric nilpotent [[1, i], [i, -1]]
        let mut s: CMat = Array2::zeros((2, 2));
        s[(0, 0)] = c64::new(1.0, 0.0);
        s[(0, 1)] = c64::new(0.0, 1.0);
        s[(1, 0)] = c64::new(0.0, 1.0);
        s[(1, 1)] = c64::new(-1.0, 0.0);
        assert_eq!(nilpotent_label(&s, &tol).unwrap(), Partition(vec![2]));
    }

    #[test]
    fn dot_output_well_formed() {
        let t = ks_table_gl(3).unwrap();
        let dot = ks_table_dot(&t);
        assert!(dot.starts_with("digraph"));
        assert!(dot.contains("(2,1)"));
    }
}
