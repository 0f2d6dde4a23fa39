//! Weighted Pauli products, the shared atom of Hamiltonians and ansatz generators.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A single-qubit Pauli axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn as_char(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }

    pub fn from_char(c: char) -> Option<Axis> {
        match c.to_ascii_lowercase() {
            'x' => Some(Axis::X),
            'y' => Some(Axis::Y),
            'z' => Some(Axis::Z),
            _ => None,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PauliError {
    #[error("pauli term has no factors")]
    Empty,
    #[error("site {0} appears more than once")]
    DuplicateSite(usize),
    #[error("{sites} sites but {axes} axes")]
    LengthMismatch { sites: usize, axes: usize },
    #[error("unknown axis character {0:?}")]
    BadAxis(char),
}

/// `coefficient * prod_i sigma_{sites[i]}^{axes[i]}` with sites strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    sites: Vec<usize>,
    axes: Vec<Axis>,
    pub coefficient: f64,
}

impl PauliTerm {
    /// Builds a term from unordered `(site, axis)` factors; the factors are sorted by site.
    pub fn new(factors: &[(usize, Axis)], coefficient: f64) -> Result<Self, PauliError> {
        if factors.is_empty() {
            return Err(PauliError::Empty);
        }
        let mut f = factors.to_vec();
        f.sort_by_key(|&(s, _)| s);
        for w in f.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(PauliError::DuplicateSite(w[0].0));
            }
        }
        Ok(PauliTerm {
            sites: f.iter().map(|&(s, _)| s).collect(),
            axes: f.iter().map(|&(_, a)| a).collect(),
            coefficient,
        })
    }

    /// Parses the `"zz"` + `[i, j]` form used by the JSON documents.
    pub fn from_parts(axes: &str, sites: &[usize], coefficient: f64) -> Result<Self, PauliError> {
        let axes: Vec<Axis> = axes
            .chars()
            .map(|c| Axis::from_char(c).ok_or(PauliError::BadAxis(c)))
            .collect::<Result<_, _>>()?;
        if axes.len() != sites.len() {
            return Err(PauliError::LengthMismatch {
                sites: sites.len(),
                axes: axes.len(),
            });
        }
        let factors: Vec<_> = sites.iter().copied().zip(axes).collect();
        Self::new(&factors, coefficient)
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn factors(&self) -> impl Iterator<Item = (usize, Axis)> + '_ {
        self.sites.iter().copied().zip(self.axes.iter().copied())
    }

    pub fn axis_at(&self, site: usize) -> Option<Axis> {
        self.sites
            .binary_search(&site)
            .ok()
            .map(|i| self.axes[i])
    }

    pub fn max_site(&self) -> usize {
        *self.sites.last().expect("terms are never empty")
    }

    /// Axis string in site order, e.g. `"yxz"`.
    pub fn axes_string(&self) -> String {
        self.axes.iter().map(|a| a.as_char()).collect()
    }

    /// The common axis when every factor shares one.
    pub fn uniform_axis(&self) -> Option<Axis> {
        let first = self.axes[0];
        self.axes.iter().all(|&a| a == first).then_some(first)
    }

    /// Bit masks `(flip, phase, n_y)`: qubits flipped by X/Y, qubits carrying a
    /// sign from Y/Z, and the number of Y factors.
    pub fn masks(&self) -> PauliMasks {
        let mut m = PauliMasks::default();
        for (s, a) in self.factors() {
            let bit = 1usize << s;
            match a {
                Axis::X => m.flip |= bit,
                Axis::Y => {
                    m.flip |= bit;
                    m.sign |= bit;
                    m.n_y += 1;
                }
                Axis::Z => m.sign |= bit,
            }
        }
        m
    }

    /// Same operator with unit coefficient.
    pub fn unit(&self) -> PauliTerm {
        PauliTerm {
            sites: self.sites.clone(),
            axes: self.axes.clone(),
            coefficient: 1.0,
        }
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coefficient)?;
        for (s, a) in self.factors() {
            write!(f, " {}{}", a.as_char().to_ascii_uppercase(), s)?;
        }
        Ok(())
    }
}

/// Index-arithmetic view of a Pauli product on a little-endian register.
///
/// `P |j> = i^n_y * (-1)^popcount(j & sign) * |j ^ flip>`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PauliMasks {
    pub flip: usize,
    pub sign: usize,
    pub n_y: u32,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorts_factors_and_rejects_duplicates() {
        let t = PauliTerm::new(&[(3, Axis::Z), (1, Axis::Y), (2, Axis::X)], 0.5).unwrap();
        assert_eq!(t.sites(), &[1, 2, 3]);
        assert_eq!(t.axes_string(), "yxz");
        assert_eq!(t.max_site(), 3);
        assert_eq!(
            PauliTerm::new(&[(1, Axis::X), (1, Axis::Z)], 1.0),
            Err(PauliError::DuplicateSite(1))
        );
        assert_eq!(PauliTerm::new(&[], 1.0), Err(PauliError::Empty));
    }

    #[test]
    fn masks_and_uniform_axis() {
        let t = PauliTerm::from_parts("yxz", &[0, 1, 3], 1.0).unwrap();
        let m = t.masks();
        assert_eq!(m.flip, 0b0011);
        assert_eq!(m.sign, 0b1001);
        assert_eq!(m.n_y, 1);
        assert_eq!(t.uniform_axis(), None);
        let zz = PauliTerm::from_parts("zz", &[0, 2], 1.0).unwrap();
        assert_eq!(zz.uniform_axis(), Some(Axis::Z));
        assert!(PauliTerm::from_parts("zq", &[0, 1], 1.0).is_err());
        assert!(PauliTerm::from_parts("z", &[0, 1], 1.0).is_err());
    }
}
