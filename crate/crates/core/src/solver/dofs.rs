use nalgebra::DVector;

use crate::error::Result;
use crate::hho_local::LocalOperatorPack;
use crate::mesh::PolytopalMesh;
use crate::polybasis::projection::l2_project_face_in;
use crate::polybasis::{cell_dim, face_dim, FaceBasis, FaceGeometry, SmoothField};

/// Global numbering: all cell blocks (element order), then all face blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct DofLayout {
    pub degree: usize,
    pub num_elements: usize,
    pub num_faces: usize,
    pub boundary: Vec<bool>,
}

impl DofLayout {
    pub fn new(mesh: &PolytopalMesh, degree: usize) -> Self {
        DofLayout {
            degree,
            num_elements: mesh.num_elements(),
            num_faces: mesh.num_faces(),
            boundary: mesh.faces.iter().map(|f| f.is_boundary()).collect(),
        }
    }

    pub fn cell_dofs(&self) -> usize {
        cell_dim(self.degree)
    }

    pub fn face_dofs(&self) -> usize {
        face_dim(self.degree)
    }

    pub fn num_cell_unknowns(&self) -> usize {
        self.num_elements * self.cell_dofs()
    }

    pub fn dim(&self) -> usize {
        self.num_cell_unknowns() + self.num_faces * self.face_dofs()
    }

    pub fn cell_offset(&self, t: usize) -> usize {
        t * self.cell_dofs()
    }

    pub fn face_offset(&self, f: usize) -> usize {
        self.num_cell_unknowns() + f * self.face_dofs()
    }

    /// Whether global DOF `i` belongs to a boundary face.
    pub fn is_fixed(&self, i: usize) -> bool {
        i >= self.num_cell_unknowns() && self.boundary[(i - self.num_cell_unknowns()) / self.face_dofs()]
    }

    pub fn fixed_mask(&self) -> Vec<bool> {
        (0..self.dim()).map(|i| self.is_fixed(i)).collect()
    }

    /// Local-to-global map of element `t`.
    pub fn local_map(&self, mesh: &PolytopalMesh, t: usize) -> Vec<usize> {
        let mut map: Vec<usize> = (0..self.cell_dofs()).map(|j| self.cell_offset(t) + j).collect();
        for &f in &mesh.elements[t].faces {
            map.extend((0..self.face_dofs()).map(|j| self.face_offset(f) + j));
        }
        map
    }
}

/// Global vector of hybrid unknowns.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridDofVector {
    pub layout: DofLayout,
    pub values: DVector<f64>,
}

impl HybridDofVector {
    pub fn zeros(layout: &DofLayout) -> Self {
        HybridDofVector { values: DVector::zeros(layout.dim()), layout: layout.clone() }
    }

    pub fn cell_block(&self, t: usize) -> DVector<f64> {
        self.values.rows(self.layout.cell_offset(t), self.layout.cell_dofs()).into_owned()
    }

    pub fn face_block(&self, f: usize) -> DVector<f64> {
        self.values.rows(self.layout.face_offset(f), self.layout.face_dofs()).into_owned()
    }

    pub fn gather(&self, map: &[usize]) -> DVector<f64> {
        DVector::from_iterator(map.len(), map.iter().map(|&i| self.values[i]))
    }

    /// Largest boundary-face entry; zero on `U_{h,0}`.
    pub fn boundary_max(&self) -> f64 {
        (0..self.layout.dim()).filter(|&i| self.layout.is_fixed(i)).map(|i| self.values[i].abs()).fold(0.0, f64::max)
    }
}

/// Mesh, DOF layout and the operator packs of every element.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub mesh: PolytopalMesh,
    pub layout: DofLayout,
    pub packs: Vec<LocalOperatorPack>,
    pub maps: Vec<Vec<usize>>,
    pub quad_boost: usize,
}

impl Discretization {
    pub fn new(mesh: &PolytopalMesh, degree: usize, quad_boost: usize) -> Result<Self> {
        let packs = super::par_map(mesh.num_elements(), |t| LocalOperatorPack::from_mesh(mesh, t, degree, quad_boost))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let layout = DofLayout::new(mesh, degree);
        let maps = (0..mesh.num_elements()).map(|t| layout.local_map(mesh, t)).collect();
        Ok(Discretization { mesh: mesh.clone(), layout, packs, maps, quad_boost })
    }

    pub fn degree(&self) -> usize {
        self.layout.degree
    }

    /// `π^k_F v` on global face `f`.
    pub fn face_projection<F: SmoothField + ?Sized>(&self, v: &F, f: usize) -> Result<DVector<f64>> {
        let face = FaceGeometry::from_mesh(&self.mesh, f);
        l2_project_face_in(&|x| v.value(x), &FaceBasis::new(&face, self.degree()), &face)
    }
}

/// `I_h v`: cell projections on every element, one projection per face.
pub fn interpolate_global<F: SmoothField + ?Sized>(disc: &Discretization, v: &F) -> Result<HybridDofVector> {
    let layout = &disc.layout;
    let mut out = HybridDofVector::zeros(layout);
    let nc = layout.cell_dofs();
    let cells = super::par_map(layout.num_elements, |t| {
        crate::polybasis::projection::l2_project_cell_in(v, &disc.packs[t].cell_basis(), &disc.packs[t].cell)
    });
    for (t, c) in cells.into_iter().enumerate() {
        out.values.rows_mut(layout.cell_offset(t), nc).copy_from(&c?);
    }
    let faces = super::par_map(layout.num_faces, |f| disc.face_projection(v, f));
    for (f, c) in faces.into_iter().enumerate() {
        out.values.rows_mut(layout.face_offset(f), layout.face_dofs()).copy_from(&c?);
    }
    Ok(out)
}
