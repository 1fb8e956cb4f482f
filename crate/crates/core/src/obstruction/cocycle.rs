use num_traits::Zero;
use serde::Serialize;

use super::ObstructionError;
use crate::algebra::{Elem, SectionChoice, SquareZeroDatum};
use crate::exactlin::{reduced, solve_in, AbGroup, Int, IntMatrix, Subquotient};
use crate::modcx::{generator_element, ChainComplex, FinModule, RingMatrix, TensorProduct};
use crate::resolve::{hyper_ext, Certificate, HomComplex, Resolution};

/// `J` with its left `S`-action.
pub(crate) fn j_module(d: &SquareZeroDatum) -> FinModule {
    FinModule::new(d.s().clone(), d.j().moduli().to_vec(), d.j().left_action().to_vec()).expect("J is a left S-module")
}

/// `J ⊗_S F` for a free complex `F`, computed termwise as `J^{n_k}` with differential given by
/// the right action of the entries of `D_k`.
pub(crate) fn j_tensor(d: &SquareZeroDatum, res: &Resolution) -> ChainComplex {
    let jm = j_module(d);
    let jr = d.j().rank();
    let (lo, hi) = (res.lo(), res.hi());
    let terms = (lo..=hi).map(|k| jm.power(res.rank(k))).collect();
    let diffs = (lo + 1..=hi)
        .map(|k| {
            let dk = res.diff(k);
            let (rows, cols) = dk.shape();
            let mut m = IntMatrix::zeros(cols * jr, rows * jr);
            for i in 0..rows {
                for j in 0..cols {
                    m.put_block(j * jr, i * jr, &d.j().right_matrix(dk.get(i, j)));
                }
            }
            m
        })
        .collect();
    ChainComplex::new(d.s().clone(), lo, terms, diffs).expect("J ⊗ F is a complex")
}

/// Entrywise preimages of the differentials of a resolution over `S`.
#[derive(Clone, Debug)]
pub struct LiftedDifferentials {
    datum: SquareZeroDatum,
    base: Resolution,
    tilde: Vec<RingMatrix>,
}

impl LiftedDifferentials {
    pub fn datum(&self) -> &SquareZeroDatum {
        &self.datum
    }

    pub fn base(&self) -> &Resolution {
        &self.base
    }

    /// `D̃_k` over `R`; zero outside the resolution.
    pub fn tilde(&self, k: i64) -> RingMatrix {
        let lo = self.base.lo();
        if k > lo && k <= self.base.hi() {
            self.tilde[(k - lo - 1) as usize].clone()
        } else {
            RingMatrix::zeros(self.datum.r().clone(), self.base.rank(k), self.base.rank(k - 1))
        }
    }

    /// `π(D̃_k) = D_k` in every degree.
    pub fn contract_holds(&self) -> bool {
        (self.base.lo() + 1..=self.base.hi()).all(|k| self.tilde(k).map_entries(self.datum.pi()) == self.base.diff(k))
    }

    /// `J ⊗_S F`.
    pub fn j_tensor(&self) -> ChainComplex {
        j_tensor(&self.datum, &self.base)
    }

    pub fn hom(&self) -> HomComplex {
        HomComplex::new(self.base.clone(), self.j_tensor())
    }
}

pub fn lift_differentials(d: &SquareZeroDatum, res: &Resolution) -> Result<LiftedDifferentials, ObstructionError> {
    if **res.algebra() != **d.s() {
        return Err(ObstructionError::AlgebraMismatch);
    }
    let tilde = (res.lo() + 1..=res.hi())
        .map(|k| {
            let dk = res.diff(k);
            let (rows, cols) = dk.shape();
            let entries = (0..rows).flat_map(|i| (0..cols).map(move |j| (i, j))).map(|(i, j)| d.lift(dk.get(i, j))).collect();
            RingMatrix::from_entries(d.r().clone(), rows, cols, entries)
        })
        .collect();
    let out = LiftedDifferentials { datum: d.clone(), base: res.clone(), tilde };
    debug_assert!(out.contract_holds());
    Ok(out)
}

/// The class of the obstruction in `Ext²_S(M, J ⊗_S M)`, read through `J ⊗ F_0 → J ⊗ M`.
#[derive(Clone, Debug, Serialize)]
pub struct ClassicalClass {
    pub group: AbGroup,
    #[serde(serialize_with = "crate::exactlin::serialize_ints")]
    pub coords: Elem,
    pub is_zero: bool,
}

/// `e_k = D̃_k D̃_{k−1}`, read in `J ⊗ F_{k−2}`, as a degree-2 cocycle of `Hom(F, J ⊗ F)`.
#[derive(Clone, Debug)]
pub struct ObstructionCocycle {
    lifted: LiftedDifferentials,
    hom: HomComplex,
    cochain: Elem,
    h2: Subquotient,
    class: Elem,
    classical: Option<ClassicalClass>,
}

impl ObstructionCocycle {
    pub fn lifted(&self) -> &LiftedDifferentials {
        &self.lifted
    }

    pub fn hom(&self) -> &HomComplex {
        &self.hom
    }

    pub fn cochain(&self) -> &[Int] {
        &self.cochain
    }

    /// The class in the truncated hyper-Ext² group.
    pub fn class(&self) -> &[Int] {
        &self.class
    }

    pub fn ext2_group(&self) -> &AbGroup {
        self.h2.group()
    }

    pub fn class_is_zero(&self) -> bool {
        self.class.iter().all(Zero::is_zero)
    }

    /// `None` when the resolution is too short to compute `Ext²(M, J ⊗ M)`.
    pub fn classical(&self) -> Option<&ClassicalClass> {
        self.classical.as_ref()
    }

    /// `e_k: F_k → J ⊗ F_{k−2}` as generator images.
    pub fn component(&self, k: i64) -> Vec<Elem> {
        self.hom.images(2, &self.cochain, k)
    }
}

fn j_row(d: &SquareZeroDatum, row: &[Elem], k: i64) -> Result<Elem, ObstructionError> {
    let mut out = Vec::new();
    for x in row {
        let c = d.j_coords(x).ok_or_else(|| ObstructionError::InternalInconsistency(format!("D̃∘D̃ leaves J in degree {k}")))?;
        out.extend(c);
    }
    Ok(out)
}

pub fn obstruction_cocycle(lifted: &LiftedDifferentials) -> Result<ObstructionCocycle, ObstructionError> {
    let d = &lifted.datum;
    let res = &lifted.base;
    let r = d.r().clone();
    let rr = r.rank();
    let hom = lifted.hom();
    let mut ring_route = Vec::new();
    let mut int_route = Vec::new();
    for k in res.lo() + 2..=res.hi() {
        let prod = lifted.tilde(k).mul(&lifted.tilde(k - 1));
        let composite = &lifted.tilde(k - 1).to_int_matrix() * &lifted.tilde(k).to_int_matrix();
        let n2 = res.rank(k - 2);
        for i in 0..res.rank(k) {
            let row: Vec<Elem> = (0..n2).map(|m| prod.get(i, m).clone()).collect();
            ring_route.push(((k, i), j_row(d, &row, k)?));
            let v = composite.mul_vec(&generator_element(&r, res.rank(k), i));
            let blocks: Vec<Elem> = (0..n2).map(|m| r.reduce(v[m * rr..(m + 1) * rr].to_vec())).collect();
            int_route.push(((k, i), j_row(d, &blocks, k)?));
        }
    }
    if ring_route != int_route {
        return Err(ObstructionError::InternalInconsistency("ring and integer compositions disagree".into()));
    }
    let lookup = |k: i64, i: usize| -> Elem {
        ring_route.iter().find(|(key, _)| *key == (k, i)).map(|(_, v)| v.clone()).expect("component present")
    };
    let cochain = hom.cochain_from_images(2, lookup);
    if !hom.is_cocycle(2, &cochain) {
        return Err(ObstructionError::InternalInconsistency("the obstruction is not a cocycle".into()));
    }
    let h2 = hom.cohomology(2);
    let class = h2.coords(&cochain).ok_or_else(|| ObstructionError::InternalInconsistency("cocycle has no class".into()))?;
    let classical = classical_class(lifted, &hom, &cochain)?;
    Ok(ObstructionCocycle { lifted: lifted.clone(), hom, cochain, h2, class, classical })
}

fn classical_class(lifted: &LiftedDifferentials, hom: &HomComplex, e: &[Int]) -> Result<Option<ClassicalClass>, ObstructionError> {
    let d = &lifted.datum;
    let res = &lifted.base;
    let target = res.target();
    if target.bounds() != (0, 0) || res.hi() < 3 {
        return Ok(None);
    }
    let m = target.term(0);
    let t = TensorProduct::new(d.j(), m)?;
    let aug = res.augmentation_images(0);
    let jr = d.j().rank();
    let ext = hyper_ext(res, &ChainComplex::concentrated(t.module().clone(), 0), 2)?;
    let images = |k: i64, i: usize| -> Elem {
        let row = &hom.images(2, e, k)[i];
        let mut acc = vec![Int::zero(); t.module().rank()];
        for (g, y) in aug.iter().enumerate() {
            for (a, b) in acc.iter_mut().zip(t.pure(&row[g * jr..(g + 1) * jr], y)) {
                *a += b;
            }
        }
        acc
    };
    let f = ext.hom().cochain_from_images(2, images);
    let coords = ext
        .class_of(&f)
        .ok_or_else(|| ObstructionError::InternalInconsistency("projected obstruction is not a cocycle".into()))?;
    let is_zero = coords.iter().all(Zero::is_zero);
    Ok(Some(ClassicalClass { group: ext.group().clone(), coords, is_zero }))
}

/// Whether `Tor^S_i(J, X) = H_i(J ⊗ F)` vanishes for every `i ≥ 1`, as far as the
/// resolution certificate allows.
#[derive(Clone, Debug, Serialize)]
pub struct TorCheck {
    /// Degrees checked, `1..=through`.
    pub through: i64,
    pub nonzero: Vec<i64>,
    /// True when the checked range covers every degree (finite or periodic resolution).
    pub certified: bool,
}

impl TorCheck {
    pub fn vanishes(&self) -> bool {
        self.certified && self.nonzero.is_empty()
    }
}

pub fn tor_check(d: &SquareZeroDatum, res: &Resolution) -> TorCheck {
    let top_x = res.target().hi();
    let (through, certified, res) = match *res.certificate() {
        Certificate::Finite { length } => (length, true, res.clone()),
        Certificate::Periodic { start, period } => {
            let t = start + period;
            (t, true, res.extended(t + 1))
        }
        Certificate::Truncated { .. } => (res.hi() - 1, false, res.clone()),
    };
    let jf = j_tensor(d, &res);
    let nonzero = (top_x + 1..=through).filter(|&i| !jf.homology(i).module.is_zero_module()).collect();
    TorCheck { through, nonzero, certified }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    /// A full solution exists: truncated solvability with Tor-vanishing, or a periodic solution.
    Vanishes,
    /// Already the truncated system has no solution.
    Obstructed,
}

/// The solution set `{h : ∂h = e}` as `h₀ + Z¹`, organised by `H¹ = Z¹/B¹`.
#[derive(Clone, Debug)]
pub struct NullHomotopies {
    pub h0: Elem,
    pub h1: Subquotient,
    /// Whether `H¹` of the truncation is certified to be `Ext¹(X, J ⊗ X)`.
    pub certified: bool,
    pub periodic: bool,
}

impl NullHomotopies {
    /// `h₀ + g` for the class with coordinates `coords`.
    pub fn representative(&self, coords: &[Int], hom: &HomComplex) -> Elem {
        let g = self.h1.element(coords);
        reduced(self.h0.iter().zip(&g).map(|(a, b)| a + b).collect(), &hom.moduli(1))
    }
}

/// Solves `∂h = e`, checking solvability against the class computation. When Tor-vanishing is
/// not certified, a solution with `h_{k+p} = h_k` on the periodic range is sought instead.
pub fn solve_null_homotopies(ob: &ObstructionCocycle) -> Result<NullHomotopies, ObstructionError> {
    let hom = &ob.hom;
    let delta = hom.coboundary(1);
    let sol = solve_in(&delta, &ob.cochain, &hom.moduli(1), &hom.moduli(2));
    if sol.is_some() != ob.class_is_zero() {
        return Err(ObstructionError::InternalInconsistency("solver and class computation disagree".into()));
    }
    let Some(h0) = sol else {
        return Err(ObstructionError::NoSolution);
    };
    let res = &ob.lifted.base;
    let tor = tor_check(&ob.lifted.datum, res);
    if tor.vanishes() {
        return Ok(NullHomotopies { h0, h1: hom.cohomology(1), certified: true, periodic: false });
    }
    match *res.certificate() {
        Certificate::Periodic { start, period } => match periodic_solution(ob, start, period)? {
            Some(mut h0) => {
                // The extended resolution agrees with `res` up to its top, so the cochain
                // layouts share a prefix.
                h0.truncate(hom.dim(1));
                Ok(NullHomotopies { h0, h1: hom.cohomology(1), certified: false, periodic: true })
            }
            None => Err(ObstructionError::Undecided(format!(
                "Tor^S(J, X) is nonzero in degrees {:?} and no periodic null homotopy exists",
                tor.nonzero
            ))),
        },
        _ => Err(ObstructionError::Undecided(format!(
            "Tor^S(J, X) is not certified to vanish (nonzero in {:?}, checked through {})",
            tor.nonzero, tor.through
        ))),
    }
}

/// A null homotopy on the truncation through `start + period` with `h_{start+period} = h_start`;
/// periodicity of `F` then extends it to every degree.
fn periodic_solution(ob: &ObstructionCocycle, start: i64, period: i64) -> Result<Option<Elem>, ObstructionError> {
    let res = ob.lifted.base.extended(start + period);
    let lifted = super::lift_differentials(&ob.lifted.datum, &res)?;
    let ob2 = obstruction_cocycle(&lifted)?;
    let hom = &ob2.hom;
    let delta = hom.coboundary(1);
    let m1 = hom.moduli(1);
    let (Some(src), Some(dst)) = (hom.block_range(1, start), hom.block_range(1, start + period)) else {
        return Ok(solve_in(&delta, &ob2.cochain, &m1, &hom.moduli(2)));
    };
    // Rows pinning h_{start+period} to h_start.
    let width = src.len();
    let mut pin = IntMatrix::zeros(width, m1.len());
    for t in 0..width {
        pin.set(t, dst.start + t, Int::from(1));
        pin.set(t, src.start + t, Int::from(-1));
    }
    let system = delta.vstack(&pin);
    let mut target_moduli = hom.moduli(2);
    target_moduli.extend_from_slice(&m1[src]);
    let mut rhs = ob2.cochain.clone();
    rhs.extend(vec![Int::zero(); width]);
    Ok(solve_in(&system, &rhs, &m1, &target_moduli))
}

/// The obstruction class does not depend on the section: the difference of the cocycles for
/// two sections is a coboundary.
pub fn section_invariant(d: &SquareZeroDatum, res: &Resolution, other: SectionChoice) -> Result<bool, ObstructionError> {
    let a = obstruction_cocycle(&lift_differentials(d, res)?)?;
    let b = obstruction_cocycle(&lift_differentials(&d.with_section(other), res)?)?;
    let diff: Vec<Int> = a.cochain.iter().zip(&b.cochain).map(|(x, y)| x - y).collect();
    let hom = &a.hom;
    let exact = solve_in(&hom.coboundary(1), &diff, &hom.moduli(1), &hom.moduli(2)).is_some();
    Ok(exact && a.class_is_zero() == b.class_is_zero())
}
