//! Stabilizer tableaux for the Clifford circuits of the TTN example and the
//! swap automaton.
//!
//! A generator is `i^k X^x Z^z` with bit-packed `x`, `z` rows and `k` mod 4.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::lattice::grid_points;

/// Largest TTN example simulated by [`run_ttn_example`].
pub const MAX_TTN_LAYERS: usize = 13;
/// Largest qubit count for [`run_qca`].
pub const MAX_QCA_QUBITS: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerTableau {
    n: usize,
    words: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: Vec<u8>,
}

#[inline]
fn get(row: &[u64], q: usize) -> bool {
    row[q / 64] >> (q % 64) & 1 == 1
}

#[inline]
fn flip(row: &mut [u64], q: usize) {
    row[q / 64] ^= 1 << (q % 64);
}

impl StabilizerTableau {
    /// `|0...0>`, stabilized by every `Z_i`.
    pub fn zero(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid!("a tableau needs at least one qubit"));
        }
        let words = n.div_ceil(64);
        let mut z = alloc::vec![0u64; n * words];
        for i in 0..n {
            flip(&mut z[i * words..(i + 1) * words], i);
        }
        Ok(Self {
            n,
            words,
            x: alloc::vec![0; n * words],
            z,
            phase: alloc::vec![0; n],
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    fn check(&self, qs: &[usize]) -> Result<()> {
        for &q in qs {
            if q >= self.n {
                return Err(invalid!("qubit {q} out of range for {} qubits", self.n));
            }
        }
        Ok(())
    }

    fn rows(&mut self) -> impl Iterator<Item = (&mut [u64], &mut [u64], &mut u8)> {
        self.x
            .chunks_mut(self.words)
            .zip(self.z.chunks_mut(self.words))
            .zip(self.phase.iter_mut())
            .map(|((x, z), k)| (x, z, k))
    }

    /// Generator `i` as a string over `I, X, Y, Z` with its sign, e.g. `-YX`.
    pub fn generator(&self, i: usize) -> alloc::string::String {
        let x = &self.x[i * self.words..(i + 1) * self.words];
        let z = &self.z[i * self.words..(i + 1) * self.words];
        let ys = (0..self.n).filter(|&q| get(x, q) && get(z, q)).count();
        // i^k X Z = i^(k - 1) Y on each Y position
        let k = (self.phase[i] as usize + 3 * ys) % 4;
        let mut s = alloc::string::String::from(match k {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        });
        for q in 0..self.n {
            s.push(match (get(x, q), get(z, q)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (true, true) => 'Y',
                (false, true) => 'Z',
            });
        }
        s
    }

    pub fn hadamard(&mut self, q: usize) -> Result<()> {
        self.check(&[q])?;
        for (x, z, k) in self.rows() {
            let (a, b) = (get(x, q), get(z, q));
            if a && b {
                *k = (*k + 2) % 4;
            }
            if a != b {
                flip(x, q);
                flip(z, q);
            }
        }
        Ok(())
    }

    pub fn phase_gate(&mut self, q: usize) -> Result<()> {
        self.check(&[q])?;
        for (x, z, k) in self.rows() {
            if get(x, q) {
                *k = (*k + 1) % 4;
                flip(z, q);
            }
        }
        Ok(())
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check(&[control, target])?;
        if control == target {
            return Err(invalid!("CNOT needs two distinct qubits"));
        }
        for (x, z, _) in self.rows() {
            if get(x, control) {
                flip(x, target);
            }
            if get(z, target) {
                flip(z, control);
            }
        }
        Ok(())
    }

    /// Conjugation by `exp(-i pi X_i X_j / 4)`: generators anticommuting with
    /// `X_i X_j` pick up the factor `-i X_i X_j`.
    pub fn xx_rotation(&mut self, i: usize, j: usize) -> Result<()> {
        self.check(&[i, j])?;
        if i == j {
            return Err(invalid!("the XX rotation needs two distinct qubits"));
        }
        for (x, z, k) in self.rows() {
            if get(z, i) != get(z, j) {
                flip(x, i);
                flip(x, j);
                *k = (*k + 3) % 4;
            }
        }
        Ok(())
    }

    pub fn swap(&mut self, i: usize, j: usize) -> Result<()> {
        self.check(&[i, j])?;
        if i == j {
            return Err(invalid!("swap needs two distinct qubits"));
        }
        for (x, z, _) in self.rows() {
            for r in [x, z] {
                if get(r, i) != get(r, j) {
                    flip(r, i);
                    flip(r, j);
                }
            }
        }
        Ok(())
    }

    /// Generators commute pairwise, are independent and Hermitian.
    pub fn is_valid(&self) -> bool {
        let w = self.words;
        for i in 0..self.n {
            let (xi, zi) = (&self.x[i * w..(i + 1) * w], &self.z[i * w..(i + 1) * w]);
            let ys: u32 = xi.iter().zip(zi).map(|(a, b)| (a & b).count_ones()).sum();
            if !(self.phase[i] as u32 + ys).is_multiple_of(2) {
                return false;
            }
            for j in (i + 1)..self.n {
                let (xj, zj) = (&self.x[j * w..(j + 1) * w], &self.z[j * w..(j + 1) * w]);
                let s: u32 = (0..w)
                    .map(|k| ((xi[k] & zj[k]) ^ (zi[k] & xj[k])).count_ones())
                    .sum();
                if !s.is_multiple_of(2) {
                    return false;
                }
            }
        }
        let rows = (0..self.n)
            .map(|i| {
                let mut r = self.x[i * w..(i + 1) * w].to_vec();
                r.extend_from_slice(&self.z[i * w..(i + 1) * w]);
                r
            })
            .collect();
        gf2_rank(rows) == self.n
    }

    /// Entanglement entropy of the qubits `a` in bits: the GF(2) rank of the
    /// generators restricted to `a`, minus `|a|`.
    pub fn entropy(&self, a: &[usize]) -> Result<usize> {
        self.check(a)?;
        let mut cols = a.to_vec();
        cols.sort_unstable();
        cols.dedup();
        if cols.len() != a.len() {
            return Err(invalid!("subsystem lists a qubit twice"));
        }
        let m = cols.len();
        let words = (2 * m).div_ceil(64).max(1);
        let w = self.words;
        let rows = (0..self.n)
            .map(|i| {
                let (x, z) = (&self.x[i * w..(i + 1) * w], &self.z[i * w..(i + 1) * w]);
                let mut r = alloc::vec![0u64; words];
                for (c, &q) in cols.iter().enumerate() {
                    if get(x, q) {
                        flip(&mut r, c);
                    }
                    if get(z, q) {
                        flip(&mut r, m + c);
                    }
                }
                r
            })
            .collect();
        Ok(gf2_rank(rows) - m)
    }
}

/// Rank over GF(2) of bit-packed rows of equal length.
pub fn gf2_rank(mut rows: Vec<Vec<u64>>) -> usize {
    let Some(words) = rows.first().map(Vec::len) else {
        return 0;
    };
    let mut rank = 0;
    for col in 0..words * 64 {
        let (wi, bit) = (col / 64, 1u64 << (col % 64));
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][wi] & bit != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = core::mem::take(&mut rows[rank]);
        for r in rows.iter_mut().skip(rank + 1) {
            if r[wi] & bit != 0 {
                for (a, b) in r[wi..].iter_mut().zip(&pivot[wi..]) {
                    *a ^= b;
                }
            }
        }
        rows[rank] = pivot;
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Gate pairs `(2^tau (k - 1/2) - 1, 2^tau k - 1)` of layer `tau` of the TTN
/// example on `2^T` sites.
pub fn ttn_schedule(layers: usize, tau: usize) -> Vec<(usize, usize)> {
    let h = 1usize << (tau - 1);
    (1..=(1usize << (layers - tau)))
        .map(|k| (2 * h * k - h - 1, 2 * h * k - 1))
        .collect()
}

/// Entropy of the last `p_T` sites of the TTN example state, where
/// `p_1 = 1` and `p_(T+2) = 4 p_T - 1`.
pub fn run_ttn_example(layers: usize) -> Result<usize> {
    if layers == 0 || layers.is_multiple_of(2) {
        return Err(invalid!(
            "the TTN example needs an odd positive number of layers, got {layers}"
        ));
    }
    if layers > MAX_TTN_LAYERS {
        return Err(Error::ResourceLimit {
            what: "TTN example layers",
            needed: layers as u128,
            limit: MAX_TTN_LAYERS as u128,
        });
    }
    let n = 1usize << layers;
    let mut t = StabilizerTableau::zero(n)?;
    for tau in (1..=layers).rev() {
        for (i, j) in ttn_schedule(layers, tau) {
            t.xx_rotation(i, j)?;
        }
    }
    let mut p = 1usize;
    for _ in 0..(layers - 1) / 2 {
        p = 4 * p - 1;
    }
    let a: Vec<usize> = (n - p..n).collect();
    t.entropy(&a)
}

fn qca_index(size: usize, coords: impl Iterator<Item = usize>) -> usize {
    coords.fold(0, |acc, c| acc * size + c % size)
}

/// Diagonal swaps on the `2 x ... x 2` plaquettes whose corners have all
/// coordinates `= parity` mod 2, on the periodic lattice of side `size`.
/// Each corner is swapped with its antipode.
pub fn apply_plaquette_layer(
    t: &mut StabilizerTableau,
    dim: usize,
    size: usize,
    parity: usize,
) -> Result<()> {
    for_each_plaquette_pair(dim, size, parity, |i, j| t.swap(i, j))
}

fn for_each_plaquette_pair(
    dim: usize,
    size: usize,
    parity: usize,
    mut f: impl FnMut(usize, usize) -> Result<()>,
) -> Result<()> {
    for origin in grid_points(dim, size / 2) {
        for corner in grid_points(dim, 2).filter(|c| c[0] == 0) {
            let a = qca_index(
                size,
                origin.iter().zip(&corner).map(|(o, c)| 2 * o + parity + c),
            );
            let b = qca_index(
                size,
                origin
                    .iter()
                    .zip(&corner)
                    .map(|(o, c)| 2 * o + parity + 1 - c),
            );
            f(a, b)?;
        }
    }
    Ok(())
}

/// Swap automaton on the periodic `size^dim` lattice: entangled pairs
/// `exp(-i pi XX/4)|00>` across the diagonals of the odd-offset plaquettes,
/// then `layers` rounds of even-offset followed by odd-offset diagonal swaps.
/// Qubits are indexed lexicographically, first coordinate most significant.
pub fn run_qca(dim: usize, size: usize, layers: usize) -> Result<StabilizerTableau> {
    if dim == 0 {
        return Err(invalid!("dimension must be positive"));
    }
    if size < 2 || !size.is_multiple_of(2) {
        return Err(invalid!(
            "the automaton needs an even side length, got {size}"
        ));
    }
    let n = (size as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
    if n > MAX_QCA_QUBITS as u128 {
        return Err(Error::ResourceLimit {
            what: "automaton qubits",
            needed: n,
            limit: MAX_QCA_QUBITS as u128,
        });
    }
    let mut t = StabilizerTableau::zero(n as usize)?;
    for_each_plaquette_pair(dim, size, 1, |i, j| t.xx_rotation(i, j))?;
    for _ in 0..layers {
        apply_plaquette_layer(&mut t, dim, size, 0)?;
        apply_plaquette_layer(&mut t, dim, size, 1)?;
        debug_assert!(t.n > 256 || t.is_valid());
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn zero_state() {
        let t = StabilizerTableau::zero(3).unwrap();
        assert_eq!(t.generator(0), "+ZII");
        assert_eq!(t.generator(2), "+IIZ");
        assert_eq!(t.entropy(&[0, 2]).unwrap(), 0);
        assert!(StabilizerTableau::zero(0).is_err());
    }

    #[test]
    fn xx_rotation_images() {
        let mut t = StabilizerTableau::zero(2).unwrap();
        t.xx_rotation(0, 1).unwrap();
        assert_eq!(t.generator(0), "-YX");
        assert_eq!(t.generator(1), "-XY");
        assert_eq!(t.entropy(&[0]).unwrap(), 1);
        t.xx_rotation(0, 1).unwrap();
        assert_eq!(t.entropy(&[0]).unwrap(), 0);
        assert!(t.is_valid());
    }

    #[test]
    fn single_qubit_gates() {
        let mut t = StabilizerTableau::zero(1).unwrap();
        t.hadamard(0).unwrap();
        assert_eq!(t.generator(0), "+X");
        t.phase_gate(0).unwrap();
        assert_eq!(t.generator(0), "+Y");
        t.phase_gate(0).unwrap();
        assert_eq!(t.generator(0), "-X");
        t.hadamard(0).unwrap();
        assert_eq!(t.generator(0), "-Z");
        assert!(t.is_valid());
    }

    #[test]
    fn bell_pair_by_cnot() {
        let mut t = StabilizerTableau::zero(2).unwrap();
        t.hadamard(0).unwrap();
        t.cnot(0, 1).unwrap();
        assert_eq!(t.generator(0), "+XX");
        assert_eq!(t.generator(1), "+ZZ");
        assert_eq!(t.entropy(&[1]).unwrap(), 1);
    }

    #[test]
    fn swap_moves_partner() {
        let mut t = StabilizerTableau::zero(3).unwrap();
        t.xx_rotation(0, 1).unwrap();
        assert_eq!(t.entropy(&[0, 1]).unwrap(), 0);
        t.swap(1, 2).unwrap();
        assert_eq!(t.entropy(&[0]).unwrap(), 1);
        assert_eq!(t.entropy(&[0, 1]).unwrap(), 1);
        let before = t.clone();
        t.swap(1, 2).unwrap();
        t.swap(1, 2).unwrap();
        assert_eq!(t, before);
    }

    #[test]
    fn disjoint_rotations_commute() {
        let mut a = StabilizerTableau::zero(4).unwrap();
        let mut b = a.clone();
        a.xx_rotation(0, 1).unwrap();
        a.xx_rotation(2, 3).unwrap();
        b.xx_rotation(2, 3).unwrap();
        b.xx_rotation(0, 1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn index_errors() {
        let mut t = StabilizerTableau::zero(2).unwrap();
        assert!(t.xx_rotation(0, 2).is_err());
        assert!(t.swap(1, 1).is_err());
        assert!(t.entropy(&[0, 0]).is_err());
    }

    #[test]
    fn ttn_small() {
        assert_eq!(run_ttn_example(1).unwrap(), 1);
        assert_eq!(run_ttn_example(3).unwrap(), 2);
        assert_eq!(run_ttn_example(5).unwrap(), 3);
        assert!(run_ttn_example(2).is_err());
        assert!(matches!(
            run_ttn_example(15),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn schedule_matches_builder() {
        for t in [1, 3, 5] {
            for tau in 1..=t {
                let b: Vec<_> = crate::builders::ttn_gate_sites(t, tau).collect();
                assert_eq!(ttn_schedule(t, tau), b);
            }
        }
    }

    #[test]
    fn qca_initial_pairs() {
        let t = run_qca(1, 4, 0).unwrap();
        assert_eq!(t.entropy(&[0, 1]).unwrap(), 2);
        assert_eq!(t.entropy(&[1, 2]).unwrap(), 0);
        assert_eq!(t.entropy(&[3, 0]).unwrap(), 0);
        let t = run_qca(2, 4, 1).unwrap();
        assert!(t.is_valid());
        for q in 0..16 {
            assert_eq!(t.entropy(&[q]).unwrap(), 1);
        }
        assert!(run_qca(1, 5, 1).is_err());
    }

    #[test]
    fn gf2_rank_basics() {
        assert_eq!(gf2_rank(vec![]), 0);
        assert_eq!(gf2_rank(vec![vec![0b11], vec![0b01], vec![0b10]]), 2);
        assert_eq!(gf2_rank(vec![vec![0, 1], vec![1, 0]]), 2);
    }
}
