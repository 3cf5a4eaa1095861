//! Finite abelian groups `Z_N1 x ... x Z_Nd`, their subgroups and the
//! unitary Fourier transform.
//!
//! Elements are tuples reduced mod the orders; they are stored by their
//! index in lexicographic order (last coordinate fastest), so sorting by
//! index is sorting lexicographically. The dual group is identified with the
//! same tuple set through `(x, gamma) = exp(2 pi i sum_k x_k gamma_k / N_k)`.

use std::collections::VecDeque;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    orders: Vec<usize>,
}

impl FiniteAbelianGroup {
    pub fn new(orders: Vec<usize>) -> Result<Self> {
        if orders.is_empty() || orders.contains(&0) {
            return Err(Error::Contract(format!("group orders must be a non-empty list of integers >= 1, got {orders:?}")));
        }
        Ok(Self { orders })
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn order(&self) -> usize {
        self.orders.iter().product()
    }

    pub fn element(&self, mut index: usize) -> Vec<usize> {
        let mut x = vec![0; self.orders.len()];
        for (k, &n) in self.orders.iter().enumerate().rev() {
            x[k] = index % n;
            index /= n;
        }
        x
    }

    /// Index of a tuple; coordinates are reduced mod the orders.
    pub fn index(&self, x: &[usize]) -> usize {
        x.iter().zip(&self.orders).fold(0, |acc, (&c, &n)| acc * n + c % n)
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let (x, y) = (self.element(a), self.element(b));
        let s: Vec<usize> = x.iter().zip(&y).zip(&self.orders).map(|((p, q), n)| (p + q) % n).collect();
        self.index(&s)
    }

    pub fn neg(&self, a: usize) -> usize {
        let x = self.element(a);
        let s: Vec<usize> = x.iter().zip(&self.orders).map(|(p, n)| (n - p) % n).collect();
        self.index(&s)
    }

    /// `sum_k x_k gamma_k / N_k` mod 1, as an exact fraction of `lcm(N_k)`.
    fn pairing_numerator(&self, x: usize, gamma: usize) -> (u128, u128) {
        let l = self.orders.iter().fold(1u128, |acc, &n| lcm(acc, n as u128));
        let (a, b) = (self.element(x), self.element(gamma));
        let num = a
            .iter()
            .zip(&b)
            .zip(&self.orders)
            .fold(0u128, |acc, ((&p, &q), &n)| (acc + (p as u128 * q as u128 % n as u128) * (l / n as u128)) % l);
        (num, l)
    }

    /// The character value `(x, gamma)`.
    pub fn character(&self, x: usize, gamma: usize) -> Complex64 {
        let (num, l) = self.pairing_numerator(x, gamma);
        Complex64::from_polar(1.0, 2.0 * PI * num as f64 / l as f64)
    }

    /// Whether `(x, gamma) = 1`, decided in exact arithmetic.
    pub fn pairs_trivially(&self, x: usize, gamma: usize) -> bool {
        self.pairing_numerator(x, gamma).0 == 0
    }
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn lcm(a: u128, b: u128) -> u128 {
    a / gcd(a, b) * b
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subgroup {
    parent: FiniteAbelianGroup,
    generators: Vec<Vec<usize>>,
    /// Element indices in ascending (lexicographic) order.
    elements: Vec<usize>,
}

impl Subgroup {
    /// Closure of `generators` under addition.
    pub fn generated(parent: &FiniteAbelianGroup, generators: Vec<Vec<usize>>) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.len() != parent.orders.len()) {
            return Err(Error::Dimension(format!(
                "subgroup generator {g:?} has {} coordinates, the group has {}",
                g.len(),
                parent.orders.len()
            )));
        }
        let gens: Vec<usize> = generators.iter().map(|g| parent.index(g)).collect();
        let mut member = vec![false; parent.order()];
        member[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in &gens {
                let y = parent.add(x, g);
                if !member[y] {
                    member[y] = true;
                    queue.push_back(y);
                }
            }
        }
        let elements = (0..parent.order()).filter(|&i| member[i]).collect();
        let generators = gens.iter().map(|&g| parent.element(g)).collect();
        Ok(Self { parent: parent.clone(), generators, elements })
    }

    pub fn whole(parent: &FiniteAbelianGroup) -> Self {
        let generators = (0..parent.orders.len())
            .map(|k| {
                let mut e = vec![0; parent.orders.len()];
                e[k] = 1;
                e
            })
            .collect();
        Self::generated(parent, generators).expect("unit vectors have the right length")
    }

    pub fn trivial(parent: &FiniteAbelianGroup) -> Self {
        Self { parent: parent.clone(), generators: Vec::new(), elements: vec![0] }
    }

    pub fn parent(&self) -> &FiniteAbelianGroup {
        &self.parent
    }

    pub fn generators(&self) -> &[Vec<usize>] {
        &self.generators
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&x).is_ok()
    }
}

/// `H* = {gamma : (h, gamma) = 1 for all h in H}`, a subgroup of the dual.
pub fn annihilator(h: &Subgroup) -> Subgroup {
    let g = h.parent();
    let elements: Vec<usize> = (0..g.order())
        .filter(|&gamma| h.generators.iter().all(|x| g.pairs_trivially(g.index(x), gamma)))
        .collect();
    let generators = elements.iter().map(|&e| g.element(e)).collect();
    Subgroup { parent: g.clone(), generators, elements }
}

/// Lexicographically smallest representative of each coset of `G^ / H*`,
/// in ascending order. Its size is `|H|`.
pub fn section(h: &Subgroup) -> Vec<usize> {
    let g = h.parent();
    let hstar = annihilator(h);
    let mut covered = vec![false; g.order()];
    let mut reps = Vec::with_capacity(h.order());
    for gamma in 0..g.order() {
        if covered[gamma] {
            continue;
        }
        reps.push(gamma);
        for &d in hstar.elements() {
            covered[g.add(gamma, d)] = true;
        }
    }
    reps
}

fn transform(group: &FiniteAbelianGroup, f: &[Complex64], inverse: bool) -> Result<Vec<Complex64>> {
    let total = group.order();
    if f.len() != total {
        return Err(Error::Dimension(format!("vector has length {}, the group has order {total}", f.len())));
    }
    let mut data = f.to_vec();
    let mut planner = FftPlanner::new();
    let mut stride = 1;
    for &n in group.orders.iter().rev() {
        if n > 1 {
            let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
            let mut line = vec![Complex64::new(0.0, 0.0); n];
            let block = stride * n;
            for start in (0..total).step_by(block) {
                for offset in 0..stride {
                    for (i, v) in line.iter_mut().enumerate() {
                        *v = data[start + offset + i * stride];
                    }
                    fft.process(&mut line);
                    for (i, v) in line.iter().enumerate() {
                        data[start + offset + i * stride] = *v;
                    }
                }
            }
        }
        stride *= n;
    }
    let scale = 1.0 / (total as f64).sqrt();
    data.iter_mut().for_each(|v| *v *= scale);
    Ok(data)
}

/// Unitary Fourier transform `f^(gamma) = |G|^-1/2 sum_x f(x) conj((x, gamma))`.
pub fn dft(group: &FiniteAbelianGroup, f: &[Complex64]) -> Result<Vec<Complex64>> {
    transform(group, f, false)
}

/// Inverse of [`dft`].
pub fn idft(group: &FiniteAbelianGroup, fhat: &[Complex64]) -> Result<Vec<Complex64>> {
    transform(group, fhat, true)
}
