use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{structure, Error, Result};

pub type Label = usize;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense complex tensor, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    pub dims: Vec<usize>,
    pub data: Vec<Complex64>,
}

impl DenseTensor {
    pub fn new(dims: Vec<usize>, data: Vec<Complex64>) -> Result<Self> {
        let size: usize = dims.iter().product();
        if size != data.len() {
            return Err(structure!("{} elements for shape {dims:?}", data.len()));
        }
        Ok(Self { dims, data })
    }

    pub fn scalar(v: Complex64) -> Self {
        Self {
            dims: Vec::new(),
            data: alloc::vec![v],
        }
    }

    /// Identity wire `delta(i, j)` of dimension `dim`.
    pub fn delta(dim: usize) -> Self {
        let mut data = alloc::vec![ZERO; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self {
            dims: alloc::vec![dim, dim],
            data,
        }
    }

    pub fn size(&self) -> usize {
        self.data.len()
    }

    /// New tensor whose axis `i` is old axis `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> DenseTensor {
        debug_assert_eq!(perm.len(), self.dims.len());
        if perm.iter().enumerate().all(|(i, &p)| i == p) {
            return self.clone();
        }
        let rank = self.dims.len();
        let mut old_strides = alloc::vec![1usize; rank];
        for i in (0..rank.saturating_sub(1)).rev() {
            old_strides[i] = old_strides[i + 1] * self.dims[i + 1];
        }
        let dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let strides: Vec<usize> = perm.iter().map(|&p| old_strides[p]).collect();
        let mut data = Vec::with_capacity(self.data.len());
        let mut idx = alloc::vec![0usize; rank];
        let mut offset = 0usize;
        for _ in 0..self.data.len() {
            data.push(self.data[offset]);
            for ax in (0..rank).rev() {
                idx[ax] += 1;
                offset += strides[ax];
                if idx[ax] < dims[ax] {
                    break;
                }
                offset -= strides[ax] * dims[ax];
                idx[ax] = 0;
            }
        }
        DenseTensor { dims, data }
    }

    pub fn reshape(mut self, dims: Vec<usize>) -> Result<Self> {
        if dims.iter().product::<usize>() != self.data.len() {
            return Err(structure!("cannot reshape {:?} into {dims:?}", self.dims));
        }
        self.dims = dims;
        Ok(self)
    }
}

/// A tensor whose axes carry contraction labels.
#[derive(Debug, Clone)]
pub struct Labeled {
    pub labels: Vec<Label>,
    pub tensor: DenseTensor,
}

impl Labeled {
    pub fn new(labels: Vec<Label>, tensor: DenseTensor) -> Self {
        debug_assert_eq!(labels.len(), tensor.dims.len());
        Self { labels, tensor }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ContractionOrder {
    /// Repeatedly contract the pair with the smallest intermediate.
    #[default]
    Greedy,
    /// Fold the tensors in list order.
    Sequential,
}

/// Contracts every label shared by two tensors; the labels occurring once
/// must be exactly `output`, which fixes the axis order of the result.
pub fn contract_network(
    tensors: Vec<Labeled>,
    output: &[Label],
    order: ContractionOrder,
    limit: usize,
) -> Result<DenseTensor> {
    let mut count: BTreeMap<Label, (usize, usize)> = BTreeMap::new();
    for t in &tensors {
        if t.labels.len() != t.tensor.dims.len() {
            return Err(structure!("label count does not match tensor rank"));
        }
        for (ax, &l) in t.labels.iter().enumerate() {
            let e = count.entry(l).or_insert((0, t.tensor.dims[ax]));
            e.0 += 1;
            if e.1 != t.tensor.dims[ax] {
                return Err(structure!("label {l} has inconsistent dimensions"));
            }
        }
        let mut sorted = t.labels.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(structure!("repeated label within one tensor"));
        }
    }
    let mut out_size: u128 = 1;
    for l in output {
        match count.get(l) {
            Some((1, d)) => out_size *= *d as u128,
            _ => {
                return Err(structure!(
                    "output label {l} must occur in exactly one tensor"
                ))
            }
        }
    }
    if out_size > limit as u128 {
        return Err(Error::ResourceLimit {
            what: "output amplitudes",
            needed: out_size,
            limit: limit as u128,
        });
    }
    for (l, (c, _)) in &count {
        if *c > 2 {
            return Err(structure!("label {l} occurs {c} times"));
        }
        if *c == 1 && !output.contains(l) {
            return Err(structure!("label {l} is open but not requested"));
        }
    }

    let mut pool = tensors;
    if pool.is_empty() {
        if !output.is_empty() {
            return Err(structure!("empty network with open labels"));
        }
        return Ok(DenseTensor::scalar(Complex64::new(1.0, 0.0)));
    }
    while pool.len() > 1 {
        let (i, j) = match order {
            ContractionOrder::Sequential => (0, 1),
            ContractionOrder::Greedy => pick_pair(&pool),
        };
        let b = pool.remove(j);
        let a = pool.remove(i);
        let c = contract_pair(&a, &b, limit)?;
        pool.insert(i, c);
    }
    let last = pool.pop().expect("non-empty pool");
    let perm: Vec<usize> = output
        .iter()
        .map(|l| {
            last.labels
                .iter()
                .position(|x| x == l)
                .expect("output label survives")
        })
        .collect();
    Ok(last.tensor.permute(&perm))
}

fn result_size(a: &Labeled, b: &Labeled) -> (u128, bool) {
    let mut size: u128 = 1;
    let mut shared = false;
    for (ax, l) in a.labels.iter().enumerate() {
        if b.labels.contains(l) {
            shared = true;
        } else {
            size *= a.tensor.dims[ax] as u128;
        }
    }
    for (ax, l) in b.labels.iter().enumerate() {
        if !a.labels.contains(l) {
            size *= b.tensor.dims[ax] as u128;
        }
    }
    (size, shared)
}

fn pick_pair(pool: &[Labeled]) -> (usize, usize) {
    let mut best: Option<(u128, usize, usize)> = None;
    for i in 0..pool.len() {
        for j in (i + 1)..pool.len() {
            let (size, shared) = result_size(&pool[i], &pool[j]);
            if shared && best.is_none_or(|(s, _, _)| size < s) {
                best = Some((size, i, j));
            }
        }
    }
    if let Some((_, i, j)) = best {
        return (i, j);
    }
    // disconnected: outer product of the two smallest
    let mut idx: Vec<usize> = (0..pool.len()).collect();
    idx.sort_by_key(|&k| (pool[k].tensor.size(), k));
    let (a, b) = (idx[0].min(idx[1]), idx[0].max(idx[1]));
    (a, b)
}

pub(crate) fn contract_pair(a: &Labeled, b: &Labeled, limit: usize) -> Result<Labeled> {
    let (size, _) = result_size(a, b);
    if size > limit as u128 {
        return Err(Error::ResourceLimit {
            what: "intermediate tensor",
            needed: size,
            limit: limit as u128,
        });
    }
    let shared: Vec<Label> = a
        .labels
        .iter()
        .copied()
        .filter(|l| b.labels.contains(l))
        .collect();
    let a_free: Vec<usize> = (0..a.labels.len())
        .filter(|&i| !shared.contains(&a.labels[i]))
        .collect();
    let b_free: Vec<usize> = (0..b.labels.len())
        .filter(|&i| !shared.contains(&b.labels[i]))
        .collect();
    let a_shared: Vec<usize> = shared
        .iter()
        .map(|l| a.labels.iter().position(|x| x == l).unwrap())
        .collect();
    let b_shared: Vec<usize> = shared
        .iter()
        .map(|l| b.labels.iter().position(|x| x == l).unwrap())
        .collect();

    let a_perm: Vec<usize> = a_free.iter().chain(&a_shared).copied().collect();
    let b_perm: Vec<usize> = b_shared.iter().chain(&b_free).copied().collect();
    let am = a.tensor.permute(&a_perm);
    let bm = b.tensor.permute(&b_perm);
    let m: usize = a_free.iter().map(|&i| a.tensor.dims[i]).product();
    let k: usize = a_shared.iter().map(|&i| a.tensor.dims[i]).product();
    let n: usize = b_free.iter().map(|&i| b.tensor.dims[i]).product();

    let mut out = alloc::vec![ZERO; m * n];
    for i in 0..m {
        let row = &mut out[i * n..(i + 1) * n];
        for kk in 0..k {
            let x = am.data[i * k + kk];
            if x == ZERO {
                continue;
            }
            let brow = &bm.data[kk * n..(kk + 1) * n];
            for (o, y) in row.iter_mut().zip(brow) {
                *o += x * y;
            }
        }
    }
    let labels: Vec<Label> = a_free
        .iter()
        .map(|&i| a.labels[i])
        .chain(b_free.iter().map(|&i| b.labels[i]))
        .collect();
    let dims: Vec<usize> = a_free
        .iter()
        .map(|&i| a.tensor.dims[i])
        .chain(b_free.iter().map(|&i| b.tensor.dims[i]))
        .collect();
    Ok(Labeled {
        labels,
        tensor: DenseTensor { dims, data: out },
    })
}
