//! P1 finite elements on boxes: intervals in 1D, a structured right-triangle
//! split in 2D.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::exponent::{DomainDescriptor, ExponentField, Point};
use crate::math;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    domain: DomainDescriptor,
    resolution: usize,
    nodes: Vec<Point>,
    /// Flat connectivity with stride `dimension + 1`.
    connectivity: Vec<usize>,
    volumes: Vec<f64>,
    /// Gradients of the local hat functions, stride `dimension + 1`.
    hat_gradients: Vec<[f64; 2]>,
    on_boundary: Vec<bool>,
}

impl Grid {
    /// Uniform grid with `resolution` cells per axis.
    ///
    /// In 2D each cell `(i, j)` is split along its diagonal into the
    /// counter-clockwise triangles `(i,j)-(i+1,j)-(i+1,j+1)` and
    /// `(i,j)-(i+1,j+1)-(i,j+1)`. Nodes are numbered row by row.
    pub fn build(domain: &DomainDescriptor, resolution: usize) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::InvalidResolution(resolution));
        }
        let n = resolution;
        let lo = domain.lower();
        let h = [domain.extent(0) / n as f64, domain.extent(1) / n as f64];
        let (nodes, connectivity) = if domain.dimension() == 1 {
            let nodes: Vec<Point> = (0..=n)
                .map(|i| {
                    // Pin the last node exactly to the upper bound.
                    let x = if i == n { domain.upper()[0] } else { lo[0] + h[0] * i as f64 };
                    [x, 0.0]
                })
                .collect();
            let conn = (0..n).flat_map(|i| [i, i + 1]).collect();
            (nodes, conn)
        } else {
            let coord = |axis: usize, i: usize| {
                if i == n {
                    domain.upper()[axis]
                } else {
                    lo[axis] + h[axis] * i as f64
                }
            };
            let mut nodes = Vec::with_capacity((n + 1) * (n + 1));
            for j in 0..=n {
                for i in 0..=n {
                    nodes.push([coord(0, i), coord(1, j)]);
                }
            }
            let id = |i: usize, j: usize| j * (n + 1) + i;
            let mut conn = Vec::with_capacity(6 * n * n);
            for j in 0..n {
                for i in 0..n {
                    conn.extend_from_slice(&[id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                    conn.extend_from_slice(&[id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
                }
            }
            (nodes, conn)
        };

        let on_boundary = nodes.iter().map(|&x| domain.is_on_boundary(x, 1e-12)).collect();
        let mut grid = Self {
            domain: *domain,
            resolution,
            nodes,
            connectivity,
            volumes: Vec::new(),
            hat_gradients: Vec::new(),
            on_boundary,
        };
        grid.compute_geometry()?;
        Ok(grid)
    }

    fn compute_geometry(&mut self) -> Result<()> {
        let ne = self.num_elements();
        self.volumes.reserve(ne);
        self.hat_gradients.reserve(ne * self.nodes_per_element());
        for e in 0..ne {
            let ids = self.element_nodes(e);
            if self.domain.dimension() == 1 {
                let len = self.nodes[ids[1]][0] - self.nodes[ids[0]][0];
                self.volumes.push(len);
                self.hat_gradients.push([-1.0 / len, 0.0]);
                self.hat_gradients.push([1.0 / len, 0.0]);
            } else {
                let [a, b, c] = [self.nodes[ids[0]], self.nodes[ids[1]], self.nodes[ids[2]]];
                let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
                let area = 0.5 * det;
                self.volumes.push(area);
                // ∇λ_i = rot90(opposite edge) / (2 area)
                self.hat_gradients.push([(b[1] - c[1]) / det, (c[0] - b[0]) / det]);
                self.hat_gradients.push([(c[1] - a[1]) / det, (a[0] - c[0]) / det]);
                self.hat_gradients.push([(a[1] - b[1]) / det, (b[0] - a[0]) / det]);
            }
            if !(self.volumes[e] > 0.0) {
                return Err(Error::InvalidDomain(format!("element {e} has non-positive volume")));
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> &DomainDescriptor {
        &self.domain
    }

    pub fn dimension(&self) -> usize {
        self.domain.dimension()
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Mesh width along the first axis.
    pub fn h(&self) -> f64 {
        self.domain.extent(0) / self.resolution as f64
    }

    pub fn nodes_per_element(&self) -> usize {
        self.dimension() + 1
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_elements(&self) -> usize {
        self.connectivity.len() / self.nodes_per_element()
    }

    pub fn node(&self, i: usize) -> Point {
        self.nodes[i]
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn element_nodes(&self, e: usize) -> &[usize] {
        let k = self.nodes_per_element();
        &self.connectivity[e * k..(e + 1) * k]
    }

    pub fn volume(&self, e: usize) -> f64 {
        self.volumes[e]
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    pub fn total_volume(&self) -> f64 {
        self.volumes.iter().sum()
    }

    /// Constant gradients of the local hat functions on element `e`.
    pub fn hat_gradients(&self, e: usize) -> &[[f64; 2]] {
        let k = self.nodes_per_element();
        &self.hat_gradients[e * k..(e + 1) * k]
    }

    pub fn barycenter(&self, e: usize) -> Point {
        let ids = self.element_nodes(e);
        let k = ids.len() as f64;
        let mut c = [0.0; 2];
        for &i in ids {
            c[0] += self.nodes[i][0];
            c[1] += self.nodes[i][1];
        }
        [c[0] / k, c[1] / k]
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        self.on_boundary[i]
    }

    pub fn boundary_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_nodes()).filter(|&i| self.on_boundary[i])
    }

    pub fn interior_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_nodes()).filter(|&i| !self.on_boundary[i])
    }

    /// `∫ φ_i` for every node (lumped mass).
    pub fn lumped_mass(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.num_nodes()];
        let k = self.nodes_per_element() as f64;
        for e in 0..self.num_elements() {
            for &i in self.element_nodes(e) {
                m[i] += self.volumes[e] / k;
            }
        }
        m
    }
}

/// Numbering of the interior (unknown) nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Dofs {
    index_of: Vec<Option<usize>>,
    nodes: Vec<usize>,
    bandwidth: usize,
}

impl Dofs {
    pub fn new(grid: &Grid) -> Self {
        let mut index_of = vec![None; grid.num_nodes()];
        let mut nodes = Vec::new();
        for i in grid.interior_nodes() {
            index_of[i] = Some(nodes.len());
            nodes.push(i);
        }
        let mut bandwidth = 0;
        for e in 0..grid.num_elements() {
            let ids = grid.element_nodes(e);
            for &a in ids {
                for &b in ids {
                    if let (Some(i), Some(j)) = (index_of[a], index_of[b]) {
                        bandwidth = bandwidth.max(i.abs_diff(j));
                    }
                }
            }
        }
        Self {
            index_of,
            nodes,
            bandwidth,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index(&self, node: usize) -> Option<usize> {
        self.index_of[node]
    }

    pub fn node(&self, dof: usize) -> usize {
        self.nodes[dof]
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// Interior values of a nodal vector.
    pub fn restrict(&self, nodal: &[f64]) -> Vec<f64> {
        self.nodes.iter().map(|&i| nodal[i]).collect()
    }

    /// Nodal vector with zero boundary values.
    pub fn extend(&self, interior: &[f64], num_nodes: usize) -> Vec<f64> {
        let mut out = vec![0.0; num_nodes];
        for (&i, &v) in self.nodes.iter().zip(interior) {
            out[i] = v;
        }
        out
    }
}

/// P1 Laplacian stiffness matrix on the interior nodes.
pub fn stiffness_matrix(grid: &Grid, dofs: &Dofs) -> crate::banded::BandMatrix {
    let bw = dofs.bandwidth();
    let mut k = crate::banded::BandMatrix::zeros(dofs.len(), bw, bw);
    for e in 0..grid.num_elements() {
        let ids = grid.element_nodes(e);
        let grads = grid.hat_gradients(e);
        let vol = grid.volume(e);
        for (a, &na) in ids.iter().enumerate() {
            let Some(i) = dofs.index(na) else { continue };
            for (b, &nb) in ids.iter().enumerate() {
                if let Some(j) = dofs.index(nb) {
                    k.add(i, j, vol * dot(grads[a], grads[b]));
                }
            }
        }
    }
    k
}

/// Nodal values of a continuous piecewise-linear function.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.num_nodes() {
            return Err(Error::LengthMismatch {
                expected: grid.num_nodes(),
                found: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("grid function at node {i}")));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.num_nodes();
        Self {
            grid,
            values: vec![0.0; n],
        }
    }

    pub fn constant(grid: Arc<Grid>, c: f64) -> Result<Self> {
        let n = grid.num_nodes();
        Self::new(grid, vec![c; n])
    }

    /// Nodal interpolant of `f`.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(Point) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    pub fn from_field(grid: Arc<Grid>, field: &ExponentField) -> Result<Self> {
        Self::from_fn(grid, |x| field.eval(x))
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Pointwise image; fails if `f` produces non-finite values.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| f64::max(m, math::abs(*v)))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn same_grid(&self, other: &GridFunction) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    /// Elementwise-constant gradient on every element.
    pub fn gradients(&self) -> Vec<[f64; 2]> {
        (0..self.grid.num_elements())
            .map(|e| element_gradient(self, e))
            .collect()
    }

    /// `|∇u|` on every element.
    pub fn gradient_norms(&self) -> Vec<f64> {
        self.gradients().into_iter().map(norm).collect()
    }
}

#[inline]
pub(crate) fn norm(v: [f64; 2]) -> f64 {
    math::sqrt(v[0] * v[0] + v[1] * v[1])
}

#[inline]
pub(crate) fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// The constant gradient of the P1 interpolant of `u` on element `e`.
pub fn element_gradient(u: &GridFunction, e: usize) -> [f64; 2] {
    let grid = &u.grid;
    let mut g = [0.0; 2];
    for (&i, gh) in grid.element_nodes(e).iter().zip(grid.hat_gradients(e)) {
        g[0] += u.values[i] * gh[0];
        g[1] += u.values[i] * gh[1];
    }
    g
}

/// Sets boundary nodal values to zero.
pub fn dirichlet_project(u: &GridFunction) -> GridFunction {
    let mut out = u.clone();
    for i in u.grid.boundary_nodes() {
        out.values[i] = 0.0;
    }
    out
}

/// Quadrature points and positive weights, grouped by element.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    points: Vec<Point>,
    weights: Vec<f64>,
    /// Values of the element's local hat functions at each point.
    shape: Vec<[f64; 3]>,
    element: Vec<usize>,
    offsets: Vec<usize>,
    degree: usize,
}

impl QuadratureRule {
    fn from_reference(grid: &Grid, reference: &[([f64; 3], f64)], degree: usize) -> Self {
        let ne = grid.num_elements();
        let mut rule = Self {
            points: Vec::with_capacity(ne * reference.len()),
            weights: Vec::with_capacity(ne * reference.len()),
            shape: Vec::with_capacity(ne * reference.len()),
            element: Vec::with_capacity(ne * reference.len()),
            offsets: Vec::with_capacity(ne + 1),
            degree,
        };
        let k = grid.nodes_per_element();
        for e in 0..ne {
            rule.offsets.push(rule.points.len());
            let ids = grid.element_nodes(e);
            for &(bary, w) in reference {
                let mut x = [0.0; 2];
                for l in 0..k {
                    let node = grid.node(ids[l]);
                    x[0] += bary[l] * node[0];
                    x[1] += bary[l] * node[1];
                }
                rule.points.push(x);
                rule.weights.push(w * grid.volume(e));
                rule.shape.push(bary);
                rule.element.push(e);
            }
        }
        rule.offsets.push(rule.points.len());
        rule
    }

    /// One point per element at the barycenter; exact for degree 1.
    pub fn barycenter(grid: &Grid) -> Self {
        if grid.dimension() == 1 {
            Self::from_reference(grid, &[([0.5, 0.5, 0.0], 1.0)], 1)
        } else {
            let t = 1.0 / 3.0;
            Self::from_reference(grid, &[([t, t, t], 1.0)], 1)
        }
    }

    /// Two-point Gauss per interval (degree 3) or the three-point interior
    /// rule per triangle (degree 2).
    pub fn gauss(grid: &Grid) -> Self {
        if grid.dimension() == 1 {
            let s = 0.5 / math::sqrt(3.0);
            Self::from_reference(
                grid,
                &[([0.5 + s, 0.5 - s, 0.0], 0.5), ([0.5 - s, 0.5 + s, 0.0], 0.5)],
                3,
            )
        } else {
            let (a, b) = (2.0 / 3.0, 1.0 / 6.0);
            let w = 1.0 / 3.0;
            Self::from_reference(grid, &[([a, b, b], w), ([b, a, b], w), ([b, b, a], w)], 2)
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Element owning quadrature point `k`.
    pub fn element_of(&self, k: usize) -> usize {
        self.element[k]
    }

    pub fn element_range(&self, e: usize) -> core::ops::Range<usize> {
        self.offsets[e]..self.offsets[e + 1]
    }

    pub fn shape(&self, k: usize) -> &[f64; 3] {
        &self.shape[k]
    }

    /// Values of the P1 function `u` at every point.
    pub fn interpolate(&self, u: &GridFunction) -> Vec<f64> {
        let grid = u.grid();
        (0..self.len())
            .map(|k| {
                let ids = grid.element_nodes(self.element[k]);
                ids.iter().zip(self.shape[k].iter()).map(|(&i, s)| s * u.values[i]).sum()
            })
            .collect()
    }

    /// Values of a per-element quantity repeated at each point.
    pub fn per_element(&self, values: &[f64]) -> Vec<f64> {
        self.element.iter().map(|&e| values[e]).collect()
    }

    /// `e(x_k)` at every point.
    pub fn sample(&self, field: &ExponentField) -> Vec<f64> {
        self.points.iter().map(|&x| field.eval(x)).collect()
    }
}

/// `Σ w_k v_k` in point order.
pub fn integrate(values: &[f64], rule: &QuadratureRule) -> Result<f64> {
    if values.len() != rule.len() {
        return Err(Error::LengthMismatch {
            expected: rule.len(),
            found: values.len(),
        });
    }
    Ok(values.iter().zip(&rule.weights).map(|(v, w)| v * w).sum())
}
