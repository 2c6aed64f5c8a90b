//! Face lattice enumeration from vertex/facet incidences.
//!
//! Faces are stored by their closed vertex sets. The geometric faces of the
//! convex body are the relative interiors of these sets; both conventions
//! index the same lattice.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::linalg;
use crate::polytope::{HRep, Point};

const INCIDENCE_TOL: f64 = 1e-7;

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Face {
    /// Dimension of the affine span.
    pub dim: usize,
    /// Indices into [`FaceLattice::vertices`].
    pub vertices: Vec<usize>,
    /// Indices of the functionals vanishing on the face.
    pub active: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FaceLattice {
    pub dim: usize,
    #[serde(skip)]
    pub vertices: Vec<Point>,
    pub faces: Vec<Face>,
}

impl FaceLattice {
    /// `f_k` for `k = 0..=n` (the last entry is the polytope itself).
    pub fn counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.dim + 1];
        for f in &self.faces {
            c[f.dim] += 1;
        }
        c
    }

    /// `Σ (-1)^k f_k` over all faces including the polytope; equals 1.
    pub fn euler_characteristic(&self) -> i64 {
        self.counts().iter().enumerate().map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) }).sum()
    }
}

/// All non-empty faces of `h`.
///
/// Every face is an intersection of facets, so closing the facet vertex
/// sets under pairwise intersection enumerates the lattice.
pub fn face_lattice(h: &HRep) -> FaceLattice {
    let verts = h.vertices().to_vec();
    let incidence: Vec<BTreeSet<usize>> = h
        .functionals()
        .iter()
        .map(|f| (0..verts.len()).filter(|&v| f.eval(&verts[v]).abs() <= INCIDENCE_TOL).collect())
        .collect();

    let mut sets: BTreeSet<BTreeSet<usize>> = incidence.iter().cloned().collect();
    let mut frontier: Vec<BTreeSet<usize>> = sets.iter().cloned().collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for s in &frontier {
            for facet in &incidence {
                let meet: BTreeSet<usize> = s.intersection(facet).copied().collect();
                if !meet.is_empty() && sets.insert(meet.clone()) {
                    next.push(meet);
                }
            }
        }
        frontier = next;
    }
    sets.insert((0..verts.len()).collect());

    let mut faces: Vec<Face> = sets
        .into_iter()
        .map(|s| {
            let pts: Vec<Point> = s.iter().map(|&i| verts[i].clone()).collect();
            let dim = linalg::affine_dimension(&pts).unwrap_or(0);
            let active =
                (0..incidence.len()).filter(|&i| s.iter().all(|v| incidence[i].contains(v))).collect();
            Face { dim, vertices: s.into_iter().collect(), active }
        })
        .collect();
    faces.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| a.vertices.cmp(&b.vertices)));
    FaceLattice { dim: h.dim(), vertices: verts, faces }
}
