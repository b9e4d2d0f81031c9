//! Sections of the algebra bundle over a finite base grid.
//!
//! The base space is a list of labelled sample points. A [`FieldElement`]
//! carries one [`GradedElement`] per point; products are taken fiberwise
//! with the cocycle of a [`CocycleFamily`] at that point.

use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;

use crate::algebra::{self, FiberKind, GradedElement};
use crate::cocycle::CocycleFamily;
use crate::error::{check_rank, Error, Result};
use crate::index::MultiIndex;

#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub label: String,
    pub coord: Option<Vec<f64>>,
}

/// Finite sample of the base space. Labels are unique and the grid is
/// nonempty.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseGrid {
    id: String,
    points: Vec<GridPoint>,
}

impl BaseGrid {
    pub fn new(id: impl Into<String>, points: Vec<GridPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("base grid must be nonempty".into()));
        }
        let mut seen = BTreeSet::new();
        for p in &points {
            if !seen.insert(p.label.as_str()) {
                return Err(Error::InvalidArgument(format!("duplicate grid label `{}`", p.label)));
            }
        }
        Ok(BaseGrid { id: id.into(), points })
    }

    /// Grid `x0, ..., x{count-1}` with coordinates `i / (count - 1)` in
    /// `[0, 1]` (a single point sits at 0).
    pub fn uniform(id: impl Into<String>, count: usize) -> Result<Self> {
        let denom = count.saturating_sub(1).max(1) as f64;
        let points = (0..count)
            .map(|i| GridPoint {
                label: format!("x{i}"),
                coord: Some(vec![i as f64 / denom]),
            })
            .collect();
        Self::new(id, points)
    }

    /// Grid with explicit scalar coordinates, labelled `x0, x1, ...`.
    pub fn from_coords(id: impl Into<String>, coords: &[f64]) -> Result<Self> {
        let points = coords
            .iter()
            .enumerate()
            .map(|(i, &x)| GridPoint {
                label: format!("x{i}"),
                coord: Some(vec![x]),
            })
            .collect();
        Self::new(id, points)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn points(&self) -> &[GridPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.points
            .iter()
            .position(|p| p.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }
}

pub(crate) fn same_grid(a: &BaseGrid, b: &BaseGrid) -> Result<()> {
    if a.id != b.id || a.points.len() != b.points.len() || a.points.iter().zip(&b.points).any(|(x, y)| x.label != y.label) {
        return Err(Error::GridMismatch(format!("grids `{}` and `{}` differ", a.id, b.id)));
    }
    Ok(())
}

/// One graded element per grid point, all of equal rank and fiber kind.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldElement {
    grid: Arc<BaseGrid>,
    sections: Vec<GradedElement>,
}

impl FieldElement {
    pub fn new(grid: Arc<BaseGrid>, sections: Vec<GradedElement>) -> Result<Self> {
        if sections.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} sections for a grid of {} points",
                sections.len(),
                grid.len()
            )));
        }
        if let Some(first) = sections.first() {
            for s in &sections[1..] {
                check_rank(first.rank(), s.rank())?;
                if s.fiber() != first.fiber() {
                    return Err(Error::FiberMismatch(format!(
                        "sections mix {} and {} fibers",
                        first.fiber(),
                        s.fiber()
                    )));
                }
            }
        }
        Ok(FieldElement { grid, sections })
    }

    /// The same element at every grid point.
    pub fn constant(grid: Arc<BaseGrid>, element: GradedElement) -> Self {
        let sections = vec![element; grid.len()];
        FieldElement { grid, sections }
    }

    pub fn grid(&self) -> &Arc<BaseGrid> {
        &self.grid
    }

    pub fn sections(&self) -> &[GradedElement] {
        &self.sections
    }

    pub fn rank(&self) -> usize {
        self.sections[0].rank()
    }

    pub fn fiber(&self) -> FiberKind {
        self.sections[0].fiber()
    }

    fn map(&self, f: impl Fn(usize, &GradedElement) -> Result<GradedElement>) -> Result<FieldElement> {
        let sections = self
            .sections
            .iter()
            .enumerate()
            .map(|(i, s)| f(i, s))
            .collect::<Result<Vec<_>>>()?;
        Ok(FieldElement {
            grid: self.grid.clone(),
            sections,
        })
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        same_grid(&self.grid, &other.grid)?;
        self.map(|i, s| s.add(&other.sections[i]))
    }

    pub fn involution(&self) -> FieldElement {
        self.map(|_, s| Ok(algebra::involution(s))).expect("infallible")
    }

    /// Largest `‖A(x) - B(x)‖₁` over the grid.
    pub fn max_l1_distance(&self, other: &FieldElement) -> f64 {
        if same_grid(&self.grid, &other.grid).is_err() {
            return f64::INFINITY;
        }
        self.sections
            .iter()
            .zip(&other.sections)
            .map(|(a, b)| a.l1_distance(b))
            .fold(0.0, f64::max)
    }
}

/// Section at `x` is `star(A(x), B(x), fam(x))`.
pub fn fiberwise_star(a: &FieldElement, b: &FieldElement, fam: &CocycleFamily) -> Result<FieldElement> {
    same_grid(&a.grid, &b.grid)?;
    same_grid(&a.grid, fam.grid())?;
    a.map(|i, s| algebra::star(s, &b.sections[i], &fam.cocycle_at(i)))
}

pub fn evaluate_at(a: &FieldElement, x: &str) -> Result<GradedElement> {
    Ok(a.sections[a.grid.position(x)?].clone())
}

/// Structure map: the section at `x` becomes `f(x) · A(x)`.
pub fn structure_mul(f: &[Complex64], a: &FieldElement) -> Result<FieldElement> {
    if f.len() != a.grid.len() {
        return Err(Error::GridMismatch(format!(
            "function has {} samples, grid has {}",
            f.len(),
            a.grid.len()
        )));
    }
    a.map(|i, s| Ok(s.scale(f[i])))
}

/// Scales the degree-χ coefficient by `exp(2πi χ·t)` at every point.
pub fn fiberwise_torus_action(a: &FieldElement, t: &[f64]) -> Result<FieldElement> {
    check_rank(a.rank(), t.len())?;
    a.map(|_, s| Ok(s.map_phases(|chi| Complex64::from_polar(1.0, TAU * chi.dot(t)))))
}

pub fn isotypic_projection(a: &FieldElement, chi: &MultiIndex) -> Result<FieldElement> {
    check_rank(a.rank(), chi.rank())?;
    a.map(|_, s| Ok(s.project(chi)))
}

/// Union of the supports of all sections.
pub fn joint_support(a: &FieldElement) -> BTreeSet<MultiIndex> {
    a.sections.iter().flat_map(algebra::grading_support).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{star, FiberKind};
    use crate::cocycle::{make_bicharacter, SkewForm};
    use crate::random;
    use std::f64::consts::PI;

    fn idx(v: &[i64]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    fn random_field(rng: &mut impl rand::Rng, grid: &Arc<BaseGrid>, fiber: FiberKind) -> FieldElement {
        let sections = (0..grid.len()).map(|_| random::element(rng, 2, fiber, 3, 6)).collect();
        FieldElement::new(grid.clone(), sections).unwrap()
    }

    #[test]
    fn grid_rejects_duplicates_and_empty() {
        let p = |l: &str| GridPoint { label: l.into(), coord: None };
        assert!(BaseGrid::new("g", vec![p("a"), p("a")]).is_err());
        assert!(BaseGrid::new("g", vec![]).is_err());
        assert!(BaseGrid::new("g", vec![p("a"), p("b")]).is_ok());
    }

    #[test]
    fn zero_family_gives_undeformed_products() {
        let mut rng = random::seeded(1);
        let grid = Arc::new(BaseGrid::uniform("g", 4).unwrap());
        let a = random_field(&mut rng, &grid, FiberKind::Scalar);
        let b = random_field(&mut rng, &grid, FiberKind::Scalar);
        let fam = CocycleFamily::from_fn(grid.clone(), |_| SkewForm::zero(2)).unwrap();
        let ab = fiberwise_star(&a, &b, &fam).unwrap();
        for (i, s) in ab.sections().iter().enumerate() {
            assert_eq!(*s, algebra::mul_undeformed(&a.sections[i], &b.sections[i]).unwrap());
        }
    }

    #[test]
    fn single_point_grid_matches_star() {
        let mut rng = random::seeded(2);
        let grid = Arc::new(BaseGrid::uniform("one", 1).unwrap());
        let a = random_field(&mut rng, &grid, FiberKind::Matrix(2));
        let b = random_field(&mut rng, &grid, FiberKind::Matrix(2));
        let form = SkewForm::planar(0.37);
        let fam = CocycleFamily::new(grid, vec![form.clone()]).unwrap();
        let ab = fiberwise_star(&a, &b, &fam).unwrap();
        let direct = star(&a.sections[0], &b.sections[0], &make_bicharacter(form)).unwrap();
        assert_eq!(ab.sections[0], direct);
    }

    #[test]
    fn theta_equals_x_phases() {
        let grid = Arc::new(BaseGrid::from_coords("theta", &[0.0, 0.25, 0.5]).unwrap());
        let fam = CocycleFamily::from_fn(grid.clone(), |i| {
            SkewForm::planar(grid.points()[i].coord.as_ref().unwrap()[0])
        })
        .unwrap();
        let u = FieldElement::constant(grid.clone(), GradedElement::delta(idx(&[1, 0]), FiberKind::Scalar));
        let v = FieldElement::constant(grid.clone(), GradedElement::delta(idx(&[0, 1]), FiberKind::Scalar));
        let uv = fiberwise_star(&u, &v, &fam).unwrap();
        for (s, x) in uv.sections().iter().zip([0.0, 0.25, 0.5]) {
            let expected = Complex64::new(0.0, -PI * x).exp();
            assert!((s.scalar_coeff(&idx(&[1, 1])) - expected).norm() < 1e-15);
            assert_eq!(s.len(), 1);
        }
    }

    #[test]
    fn evaluation_is_compatible_with_products_and_involution() {
        let mut rng = random::seeded(3);
        let grid = Arc::new(BaseGrid::uniform("g", 5).unwrap());
        let fam = CocycleFamily::from_fn(grid.clone(), |i| SkewForm::planar(0.1 * i as f64)).unwrap();
        let a = random_field(&mut rng, &grid, FiberKind::Scalar);
        let b = random_field(&mut rng, &grid, FiberKind::Scalar);
        let ab = fiberwise_star(&a, &b, &fam).unwrap();
        for p in grid.points() {
            let x = p.label.as_str();
            let direct = star(
                &evaluate_at(&a, x).unwrap(),
                &evaluate_at(&b, x).unwrap(),
                &fam.cocycle_for(x).unwrap(),
            )
            .unwrap();
            assert_eq!(evaluate_at(&ab, x).unwrap(), direct);
            assert_eq!(
                evaluate_at(&a.involution(), x).unwrap(),
                algebra::involution(&evaluate_at(&a, x).unwrap())
            );
        }
        assert!(matches!(evaluate_at(&a, "zz"), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn constant_field_is_constant() {
        let grid = Arc::new(BaseGrid::uniform("g", 3).unwrap());
        let e = GradedElement::delta(idx(&[2, 1]), FiberKind::Scalar);
        let f = FieldElement::constant(grid, e.clone());
        for x in ["x0", "x1", "x2"] {
            assert_eq!(evaluate_at(&f, x).unwrap(), e);
        }
    }

    #[test]
    fn structure_map_is_central_and_localizes() {
        let mut rng = random::seeded(4);
        let grid = Arc::new(BaseGrid::uniform("g", 4).unwrap());
        let fam = CocycleFamily::from_fn(grid.clone(), |i| SkewForm::planar(0.3 + 0.2 * i as f64)).unwrap();
        let a = random_field(&mut rng, &grid, FiberKind::Matrix(2));
        let b = random_field(&mut rng, &grid, FiberKind::Matrix(2));
        let f: Vec<Complex64> = (0..4).map(|_| random::unit_disc(&mut rng)).collect();
        let left = fiberwise_star(&structure_mul(&f, &a).unwrap(), &b, &fam).unwrap();
        let right = fiberwise_star(&a, &structure_mul(&f, &b).unwrap(), &fam).unwrap();
        let outer = structure_mul(&f, &fiberwise_star(&a, &b, &fam).unwrap()).unwrap();
        assert!(left.max_l1_distance(&outer) < 1e-12);
        assert!(right.max_l1_distance(&outer) < 1e-12);

        let ones = vec![Complex64::new(1.0, 0.0); 4];
        assert_eq!(structure_mul(&ones, &a).unwrap(), a);

        let mut bump = vec![Complex64::new(0.0, 0.0); 4];
        bump[2] = Complex64::new(1.0, 0.0);
        let local = structure_mul(&bump, &a).unwrap();
        for (i, s) in local.sections().iter().enumerate() {
            assert_eq!(s.is_zero(), i != 2);
        }
        assert!(structure_mul(&ones[..3], &a).is_err());
    }

    #[test]
    fn torus_action_group_law_and_equivariance() {
        let mut rng = random::seeded(5);
        let grid = Arc::new(BaseGrid::uniform("g", 3).unwrap());
        let fam = CocycleFamily::from_fn(grid.clone(), |i| SkewForm::planar(0.45 * i as f64)).unwrap();
        let a = random_field(&mut rng, &grid, FiberKind::Scalar);
        let b = random_field(&mut rng, &grid, FiberKind::Scalar);
        let (t, s) = ([0.13, 0.71], [0.42, 0.05]);
        assert_eq!(fiberwise_torus_action(&a, &[0.0, 0.0]).unwrap(), a);

        let ts = fiberwise_torus_action(&fiberwise_torus_action(&a, &t).unwrap(), &s).unwrap();
        let sum = fiberwise_torus_action(&a, &[t[0] + s[0], t[1] + s[1]]).unwrap();
        assert!(ts.max_l1_distance(&sum) < 1e-12);

        let lhs = fiberwise_torus_action(&fiberwise_star(&a, &b, &fam).unwrap(), &t).unwrap();
        let rhs = fiberwise_star(
            &fiberwise_torus_action(&a, &t).unwrap(),
            &fiberwise_torus_action(&b, &t).unwrap(),
            &fam,
        )
        .unwrap();
        assert!(lhs.max_l1_distance(&rhs) < 1e-12);

        let chi = idx(&[2, -1]);
        let d = FieldElement::constant(grid, GradedElement::delta(chi.clone(), FiberKind::Scalar));
        let acted = fiberwise_torus_action(&d, &t).unwrap();
        let expected = Complex64::from_polar(1.0, TAU * (2.0 * t[0] - t[1]));
        assert!((acted.sections()[1].scalar_coeff(&chi) - expected).norm() < 1e-15);
    }

    #[test]
    fn projections_reconstruct_and_grade() {
        let mut rng = random::seeded(6);
        let grid = Arc::new(BaseGrid::uniform("g", 3).unwrap());
        let fam = CocycleFamily::from_fn(grid.clone(), |i| SkewForm::planar(0.2 * i as f64)).unwrap();
        let a = random_field(&mut rng, &grid, FiberKind::Scalar);
        let b = random_field(&mut rng, &grid, FiberKind::Scalar);

        let mut total = FieldElement::constant(grid.clone(), GradedElement::zero(2, FiberKind::Scalar));
        for chi in joint_support(&a) {
            let p = isotypic_projection(&a, &chi).unwrap();
            assert_eq!(isotypic_projection(&p, &chi).unwrap(), p);
            total = total.add(&p).unwrap();
        }
        assert_eq!(total, a);

        for chi in joint_support(&a) {
            for eta in joint_support(&b) {
                let pa = isotypic_projection(&a, &chi).unwrap();
                let pb = isotypic_projection(&b, &eta).unwrap();
                let prod = fiberwise_star(&pa, &pb, &fam).unwrap();
                let allowed: BTreeSet<_> = [&chi + &eta].into_iter().collect();
                assert!(joint_support(&prod).is_subset(&allowed));
            }
        }

        let d = FieldElement::constant(grid, GradedElement::delta(idx(&[1, 1]), FiberKind::Scalar));
        assert_eq!(isotypic_projection(&d, &idx(&[1, 1])).unwrap(), d);
        assert!(isotypic_projection(&d, &idx(&[1, 0])).unwrap().sections().iter().all(|s| s.is_zero()));
    }

    #[test]
    fn grid_mismatch_is_an_error() {
        let g1 = Arc::new(BaseGrid::uniform("a", 3).unwrap());
        let g2 = Arc::new(BaseGrid::uniform("b", 3).unwrap());
        let e = GradedElement::unit(2, FiberKind::Scalar);
        let a = FieldElement::constant(g1.clone(), e.clone());
        let b = FieldElement::constant(g2, e);
        let fam = CocycleFamily::from_fn(g1, |_| SkewForm::zero(2)).unwrap();
        assert!(matches!(fiberwise_star(&a, &b, &fam), Err(Error::GridMismatch(_))));
    }
}
