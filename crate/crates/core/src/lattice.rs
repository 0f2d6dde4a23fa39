//! Spin lattices, coupling assignments and Heisenberg Hamiltonians.
//!
//! Sites of 2D lattices are numbered row-major (`site = row * cols + col`).
//! The triangular lattice is the square lattice plus one diagonal per unit
//! cell, joining `(r + 1, c)` to `(r, c + 1)`.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::G17;
use crate::pauli::{Axis, PauliError, PauliTerm};

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("invalid dimensions for {kind}: {reason}")]
    InvalidDims { kind: LatticeKind, reason: String },
    #[error("periodic boundary needs every dimension >= 3, got {size}")]
    PeriodicTooSmall { size: usize },
    #[error("{kind} lattices do not support {boundary} boundaries")]
    BoundaryMismatch {
        kind: LatticeKind,
        boundary: Boundary,
    },
    #[error("random couplings need a seed")]
    MissingSeed,
    #[error("bitstring has {got} bits, lattice has {expected} sites")]
    LengthMismatch { expected: usize, got: usize },
    #[error("malformed lattice document: {0}")]
    Document(String),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeKind {
    Chain,
    Ring,
    Ladder,
    Square,
    Triangular,
}

impl LatticeKind {
    pub fn name(self) -> &'static str {
        match self {
            LatticeKind::Chain => "chain",
            LatticeKind::Ring => "ring",
            LatticeKind::Ladder => "ladder",
            LatticeKind::Square => "square",
            LatticeKind::Triangular => "triangular",
        }
    }

    pub fn is_one_dimensional(self) -> bool {
        matches!(self, LatticeKind::Chain | LatticeKind::Ring)
    }
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LatticeKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "chain" => Ok(LatticeKind::Chain),
            "ring" => Ok(LatticeKind::Ring),
            "ladder" => Ok(LatticeKind::Ladder),
            "square" => Ok(LatticeKind::Square),
            "triangular" => Ok(LatticeKind::Triangular),
            other => Err(format!("unknown lattice kind {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

impl Boundary {
    pub fn name(self) -> &'static str {
        match self {
            Boundary::Open => "open",
            Boundary::Periodic => "periodic",
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Boundary {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "open" => Ok(Boundary::Open),
            "periodic" => Ok(Boundary::Periodic),
            other => Err(format!("unknown boundary {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub kind: LatticeKind,
    pub dims: Vec<usize>,
    pub boundary: Boundary,
    pub sites: usize,
    /// Unordered pairs stored as `(i, j)` with `i < j`, in generation order.
    pub bonds: Vec<(usize, usize)>,
    /// Two-coloring of the sites, present iff the bond graph is bipartite.
    pub bipartition: Option<Vec<u8>>,
}

pub fn build_lattice(
    kind: LatticeKind,
    dims: &[usize],
    boundary: Boundary,
) -> Result<Lattice, LatticeError> {
    let invalid = |reason: &str| LatticeError::InvalidDims {
        kind,
        reason: reason.to_string(),
    };
    if dims.contains(&0) {
        return Err(invalid("dimensions must be positive"));
    }
    let bonds = match kind {
        LatticeKind::Chain | LatticeKind::Ring => {
            if dims.len() != 1 {
                return Err(invalid("expected one dimension"));
            }
            let n = dims[0];
            match (kind, boundary) {
                (LatticeKind::Chain, Boundary::Open) => {
                    if n < 2 {
                        return Err(invalid("a chain needs at least 2 sites"));
                    }
                    (0..n - 1).map(|i| (i, i + 1)).collect()
                }
                (LatticeKind::Ring, Boundary::Periodic) => {
                    if n < 3 {
                        return Err(LatticeError::PeriodicTooSmall { size: n });
                    }
                    let mut b: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
                    b.push((0, n - 1));
                    b
                }
                _ => return Err(LatticeError::BoundaryMismatch { kind, boundary }),
            }
        }
        LatticeKind::Ladder | LatticeKind::Square | LatticeKind::Triangular => {
            if dims.len() != 2 {
                return Err(invalid("expected two dimensions"));
            }
            let (rows, cols) = (dims[0], dims[1]);
            if kind == LatticeKind::Ladder && cols != 2 {
                return Err(invalid("a ladder's second dimension must be 2"));
            }
            if rows * cols < 2 {
                return Err(invalid("need at least 2 sites"));
            }
            // A ladder wraps along its legs only.
            let wrap_rows = boundary == Boundary::Periodic;
            let wrap_cols = boundary == Boundary::Periodic && kind != LatticeKind::Ladder;
            if wrap_rows && rows < 3 {
                return Err(LatticeError::PeriodicTooSmall { size: rows });
            }
            if wrap_cols && cols < 3 {
                return Err(LatticeError::PeriodicTooSmall { size: cols });
            }
            grid_bonds(rows, cols, wrap_rows, wrap_cols, kind == LatticeKind::Triangular)
        }
    };
    let sites = dims.iter().product();
    let bipartition = two_coloring(sites, &bonds);
    Ok(Lattice {
        kind,
        dims: dims.to_vec(),
        boundary,
        sites,
        bonds,
        bipartition,
    })
}

fn grid_bonds(
    rows: usize,
    cols: usize,
    wrap_rows: bool,
    wrap_cols: bool,
    diagonals: bool,
) -> Vec<(usize, usize)> {
    let site = |r: usize, c: usize| r * cols + c;
    let mut bonds = Vec::new();
    let mut seen = HashSet::new();
    let mut push = |a: usize, b: usize, bonds: &mut Vec<(usize, usize)>| {
        let key = (a.min(b), a.max(b));
        if a != b && seen.insert(key) {
            bonds.push(key);
        }
    };
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols || wrap_cols {
                push(site(r, c), site(r, (c + 1) % cols), &mut bonds);
            }
            if r + 1 < rows || wrap_rows {
                push(site(r, c), site((r + 1) % rows, c), &mut bonds);
            }
        }
    }
    if diagonals {
        for r in 0..rows {
            for c in 0..cols {
                let down_ok = r + 1 < rows || wrap_rows;
                let right_ok = c + 1 < cols || wrap_cols;
                if down_ok && right_ok {
                    push(site((r + 1) % rows, c), site(r, (c + 1) % cols), &mut bonds);
                }
            }
        }
    }
    bonds
}

fn two_coloring(sites: usize, bonds: &[(usize, usize)]) -> Option<Vec<u8>> {
    let mut adj = vec![Vec::new(); sites];
    for &(i, j) in bonds {
        adj[i].push(j);
        adj[j].push(i);
    }
    let mut color: Vec<Option<u8>> = vec![None; sites];
    for start in 0..sites {
        if color[start].is_some() {
            continue;
        }
        color[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let cu = color[u].unwrap();
            for &v in &adj[u] {
                match color[v] {
                    None => {
                        color[v] = Some(1 - cu);
                        queue.push_back(v);
                    }
                    Some(cv) if cv == cu => return None,
                    Some(_) => {}
                }
            }
        }
    }
    Some(color.into_iter().map(|c| c.unwrap()).collect())
}

/// Computational-basis product state; character `i` of the text form is site `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bitstring(pub Vec<bool>);

impl Bitstring {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Little-endian basis index: bit `i` of the index is site `i`.
    pub fn index(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .fold(0, |acc, (i, _)| acc | (1 << i))
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bitstring {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(format!("bitstring contains {other:?}")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Bitstring)
    }
}

/// Néel-type initial state. On bipartite lattices the color class holding
/// site 0 is set to 1; otherwise the first `ceil(N/2)` sites are set to 1.
pub fn neel_bitstring(lattice: &Lattice) -> Bitstring {
    match &lattice.bipartition {
        Some(colors) => {
            let up = colors[0];
            Bitstring(colors.iter().map(|&c| c == up).collect())
        }
        None => {
            let half = lattice.sites.div_ceil(2);
            Bitstring((0..lattice.sites).map(|i| i < half).collect())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingMode {
    Isotropic,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingModel {
    pub mode: CouplingMode,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl CouplingModel {
    pub fn isotropic() -> Self {
        CouplingModel {
            mode: CouplingMode::Isotropic,
            seed: None,
        }
    }

    pub fn random(seed: u64) -> Self {
        CouplingModel {
            mode: CouplingMode::Random,
            seed: Some(seed),
        }
    }
}

/// Name of the generator behind random couplings, recorded in run manifests.
pub const COUPLING_RNG: &str = "chacha20";

#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    pub nqubits: usize,
    pub terms: Vec<PauliTerm>,
    pub lattice: Lattice,
}

/// `H = sum_bonds sum_a J_ij^aa sigma_i^a sigma_j^a`, three terms per bond in x, y, z order.
pub fn build_hamiltonian(
    lattice: &Lattice,
    coupling: &CouplingModel,
) -> Result<Hamiltonian, LatticeError> {
    let mut rng = match coupling.mode {
        CouplingMode::Isotropic => None,
        CouplingMode::Random => {
            let seed = coupling.seed.ok_or(LatticeError::MissingSeed)?;
            Some(ChaCha20Rng::seed_from_u64(seed))
        }
    };
    let mut terms = Vec::with_capacity(3 * lattice.bonds.len());
    for &(i, j) in &lattice.bonds {
        for axis in Axis::ALL {
            // uniform on (0, 1]
            let coeff = match rng.as_mut() {
                Some(r) => 1.0 - r.random::<f64>(),
                None => 1.0,
            };
            terms.push(PauliTerm::new(&[(i, axis), (j, axis)], coeff)?);
        }
    }
    Ok(Hamiltonian {
        nqubits: lattice.sites,
        terms,
        lattice: lattice.clone(),
    })
}

/// `<b|H|b>` for a computational-basis state. Only all-`z` terms contribute.
pub fn product_state_energy(h: &Hamiltonian, bits: &Bitstring) -> Result<f64, LatticeError> {
    if bits.len() != h.nqubits {
        return Err(LatticeError::LengthMismatch {
            expected: h.nqubits,
            got: bits.len(),
        });
    }
    let energy = h
        .terms
        .iter()
        .filter(|t| t.axes().iter().all(|&a| a == Axis::Z))
        .map(|t| {
            let ones = t.sites().iter().filter(|&&s| bits.0[s]).count();
            if ones % 2 == 0 {
                t.coefficient
            } else {
                -t.coefficient
            }
        })
        .sum();
    Ok(energy)
}

#[derive(Serialize)]
struct TermOut<'a> {
    axes: String,
    sites: &'a [usize],
    coeff: G17,
}

#[derive(Serialize)]
struct DocOut<'a> {
    nqubits: usize,
    kind: LatticeKind,
    dims: &'a [usize],
    boundary: Boundary,
    bonds: Vec<[usize; 2]>,
    terms: Vec<TermOut<'a>>,
}

#[derive(Deserialize)]
struct TermIn {
    axes: String,
    sites: Vec<usize>,
    coeff: f64,
}

#[derive(Deserialize)]
struct DocIn {
    nqubits: usize,
    kind: LatticeKind,
    dims: Vec<usize>,
    boundary: Boundary,
    bonds: Vec<[usize; 2]>,
    terms: Vec<TermIn>,
}

impl Hamiltonian {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::from_str(&self.to_json()).expect("own output parses")
    }

    /// Canonical document: fixed field order, coefficients with 17 significant digits.
    pub fn to_json(&self) -> String {
        let doc = DocOut {
            nqubits: self.nqubits,
            kind: self.lattice.kind,
            dims: &self.lattice.dims,
            boundary: self.lattice.boundary,
            bonds: self.lattice.bonds.iter().map(|&(i, j)| [i, j]).collect(),
            terms: self
                .terms
                .iter()
                .map(|t| TermOut {
                    axes: t.axes_string(),
                    sites: t.sites(),
                    coeff: G17(t.coefficient),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, LatticeError> {
        let doc: DocIn =
            serde_json::from_str(text).map_err(|e| LatticeError::Document(e.to_string()))?;
        let lattice = build_lattice(doc.kind, &doc.dims, doc.boundary)?;
        let bonds: Vec<_> = doc.bonds.iter().map(|b| (b[0], b[1])).collect();
        if bonds != lattice.bonds || doc.nqubits != lattice.sites {
            return Err(LatticeError::Document(
                "bonds do not match the declared lattice".into(),
            ));
        }
        let terms = doc
            .terms
            .iter()
            .map(|t| PauliTerm::from_parts(&t.axes, &t.sites, t.coeff))
            .collect::<Result<Vec<_>, _>>()?;
        if terms.iter().any(|t| t.max_site() >= lattice.sites) {
            return Err(LatticeError::Document("term site out of range".into()));
        }
        Ok(Hamiltonian {
            nqubits: lattice.sites,
            terms,
            lattice,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(n: usize) -> Lattice {
        build_lattice(LatticeKind::Ring, &[n], Boundary::Periodic).unwrap()
    }

    /// Counts unit-distance pairs of the triangular embedding
    /// `p(r, c) = c * (1, 0) + r * (1/2, sqrt(3)/2)`.
    fn triangular_bonds_by_geometry(rows: usize, cols: usize) -> usize {
        let pos = |s: usize| {
            let (r, c) = ((s / cols) as f64, (s % cols) as f64);
            (c + 0.5 * r, r * 3f64.sqrt() / 2.0)
        };
        let n = rows * cols;
        let mut count = 0;
        for a in 0..n {
            for b in a + 1..n {
                let (pa, pb) = (pos(a), pos(b));
                let d = ((pa.0 - pb.0).powi(2) + (pa.1 - pb.1).powi(2)).sqrt();
                if (d - 1.0).abs() < 1e-9 {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn ring_of_four() {
        let l = ring(4);
        assert_eq!(l.sites, 4);
        assert_eq!(l.bonds, vec![(0, 1), (1, 2), (2, 3), (0, 3)]);
        assert_eq!(l.bipartition, Some(vec![0, 1, 0, 1]));
    }

    #[test]
    fn closed_form_bond_counts() {
        for n in 3..12 {
            assert_eq!(ring(n).bonds.len(), n);
            let c = build_lattice(LatticeKind::Chain, &[n], Boundary::Open).unwrap();
            assert_eq!(c.bonds.len(), n - 1);
        }
        for l in 2..8 {
            let lad = build_lattice(LatticeKind::Ladder, &[l, 2], Boundary::Open).unwrap();
            assert_eq!(lad.bonds.len(), 3 * l - 2);
        }
        for r in 1..6 {
            for c in 1..6 {
                if r * c < 2 {
                    continue;
                }
                let sq = build_lattice(LatticeKind::Square, &[r, c], Boundary::Open).unwrap();
                assert_eq!(sq.bonds.len(), r * (c - 1) + c * (r - 1));
                let tri = build_lattice(LatticeKind::Triangular, &[r, c], Boundary::Open).unwrap();
                assert_eq!(tri.bonds.len(), sq.bonds.len() + (r - 1) * (c - 1));
                if r >= 3 && c >= 3 {
                    let p = build_lattice(LatticeKind::Square, &[r, c], Boundary::Periodic)
                        .unwrap();
                    assert_eq!(p.bonds.len(), 2 * r * c);
                }
            }
        }
        let lad = build_lattice(LatticeKind::Ladder, &[3, 2], Boundary::Open).unwrap();
        assert_eq!((lad.sites, lad.bonds.len()), (6, 7));
        let sq = build_lattice(LatticeKind::Square, &[4, 4], Boundary::Open).unwrap();
        assert_eq!((sq.sites, sq.bonds.len()), (16, 24));
    }

    #[test]
    fn triangular_matches_geometric_enumeration() {
        let tri = build_lattice(LatticeKind::Triangular, &[5, 6], Boundary::Open).unwrap();
        assert_eq!(tri.sites, 30);
        assert_eq!(tri.bonds.len(), triangular_bonds_by_geometry(5, 6));
        assert_eq!(tri.bonds.len(), 69);
        assert!(tri.bipartition.is_none());
        for (r, c) in [(2, 2), (3, 4), (4, 7), (6, 3)] {
            let t = build_lattice(LatticeKind::Triangular, &[r, c], Boundary::Open).unwrap();
            assert_eq!(t.bonds.len(), triangular_bonds_by_geometry(r, c));
        }
    }

    #[test]
    fn bonds_are_canonical_and_in_range() {
        let cases: Vec<(LatticeKind, Vec<usize>, Boundary)> = vec![
            (LatticeKind::Ring, vec![7], Boundary::Periodic),
            (LatticeKind::Ladder, vec![5, 2], Boundary::Periodic),
            (LatticeKind::Square, vec![3, 4], Boundary::Periodic),
            (LatticeKind::Triangular, vec![4, 3], Boundary::Periodic),
        ];
        for (k, d, b) in cases {
            let l = build_lattice(k, &d, b).unwrap();
            let mut seen = HashSet::new();
            for &(i, j) in &l.bonds {
                assert!(i < j && j < l.sites);
                assert!(seen.insert((i, j)));
            }
            if let Some(colors) = &l.bipartition {
                for &(i, j) in &l.bonds {
                    assert_ne!(colors[i], colors[j]);
                }
            }
        }
    }

    #[test]
    fn bipartiteness() {
        assert!(ring(7).bipartition.is_none());
        assert!(ring(8).bipartition.is_some());
        let sq = build_lattice(LatticeKind::Square, &[3, 3], Boundary::Open).unwrap();
        assert!(sq.bipartition.is_some());
        let lad = build_lattice(LatticeKind::Ladder, &[4, 2], Boundary::Open).unwrap();
        assert!(lad.bipartition.is_some());
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(build_lattice(LatticeKind::Ring, &[0], Boundary::Periodic).is_err());
        assert!(matches!(
            build_lattice(LatticeKind::Ring, &[1], Boundary::Periodic),
            Err(LatticeError::PeriodicTooSmall { size: 1 })
        ));
        assert!(build_lattice(LatticeKind::Ladder, &[3, 3], Boundary::Open).is_err());
        assert!(build_lattice(LatticeKind::Triangular, &[6], Boundary::Open).is_err());
        assert!(matches!(
            build_lattice(LatticeKind::Square, &[1, 4], Boundary::Periodic),
            Err(LatticeError::PeriodicTooSmall { .. })
        ));
        assert!(build_lattice(LatticeKind::Ring, &[4], Boundary::Open).is_err());
    }

    #[test]
    fn neel_rules() {
        assert_eq!(neel_bitstring(&ring(4)).to_string(), "1010");
        let chain = build_lattice(LatticeKind::Chain, &[3], Boundary::Open).unwrap();
        assert_eq!(neel_bitstring(&chain).to_string(), "101");
        let tri = build_lattice(LatticeKind::Triangular, &[5, 6], Boundary::Open).unwrap();
        let bits = neel_bitstring(&tri);
        assert!(bits.0[..15].iter().all(|&b| b));
        assert!(bits.0[15..].iter().all(|&b| !b));
        assert_eq!(Bitstring::from_str("1010").unwrap().index(), 0b0101);
    }

    #[test]
    fn hamiltonian_terms() {
        let h = build_hamiltonian(&ring(4), &CouplingModel::isotropic()).unwrap();
        assert_eq!(h.terms.len(), 12);
        assert!(h.terms.iter().all(|t| t.coefficient == 1.0));

        let chain = build_lattice(LatticeKind::Chain, &[2], Boundary::Open).unwrap();
        let h2 = build_hamiltonian(&chain, &CouplingModel::isotropic()).unwrap();
        let axes: Vec<_> = h2.terms.iter().map(|t| t.axes_string()).collect();
        assert_eq!(axes, ["xx", "yy", "zz"]);
        assert!(h2.terms.iter().all(|t| t.sites() == [0, 1]));
    }

    #[test]
    fn random_couplings_are_reproducible_and_in_range() {
        let l = ring(10);
        let a = build_hamiltonian(&l, &CouplingModel::random(7)).unwrap();
        let b = build_hamiltonian(&l, &CouplingModel::random(7)).unwrap();
        let c = build_hamiltonian(&l, &CouplingModel::random(8)).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_ne!(a.to_json(), c.to_json());
        assert!(a
            .terms
            .iter()
            .all(|t| t.coefficient > 0.0 && t.coefficient <= 1.0));
        let missing = CouplingModel {
            mode: CouplingMode::Random,
            seed: None,
        };
        assert!(matches!(
            build_hamiltonian(&l, &missing),
            Err(LatticeError::MissingSeed)
        ));
    }

    #[test]
    fn product_energies() {
        let h = build_hamiltonian(&ring(4), &CouplingModel::isotropic()).unwrap();
        let neel = neel_bitstring(&h.lattice);
        assert_eq!(product_state_energy(&h, &neel).unwrap(), -4.0);
        let up: Bitstring = "1111".parse().unwrap();
        assert_eq!(product_state_energy(&h, &up).unwrap(), 4.0);
        for n in (4..=16).step_by(2) {
            let h = build_hamiltonian(&ring(n), &CouplingModel::isotropic()).unwrap();
            let e = product_state_energy(&h, &neel_bitstring(&h.lattice)).unwrap();
            assert_eq!(e, -(n as f64));
        }
        assert!(product_state_energy(&h, &"101".parse().unwrap()).is_err());
    }

    #[test]
    fn json_document_round_trips() {
        let h = build_hamiltonian(&ring(5), &CouplingModel::random(3)).unwrap();
        let text = h.to_json();
        let keys: Vec<_> = ["\"nqubits\"", "\"kind\"", "\"dims\"", "\"boundary\"", "\"bonds\"", "\"terms\""]
            .iter()
            .map(|k| text.find(k).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        let back = Hamiltonian::from_json(&text).unwrap();
        assert_eq!(back, h);
    }
}
