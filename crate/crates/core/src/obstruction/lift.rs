use std::collections::BTreeMap;

use serde::Serialize;

use super::cocycle::{tor_check, NullHomotopies, ObstructionCocycle, TorCheck};
use super::{lift_differentials, obstruction_cocycle, solve_null_homotopies, ObstructionError};
use crate::algebra::{Elem, SquareZeroDatum};
use crate::exactlin::{reduced, AbGroup, Int};
use crate::modcx::{ChainComplex, FinModule, RingMatrix, TensorProduct};
use crate::resolve::{hyper_ext, free_resolution, HomComplex, Resolution, Strategy};

/// A complex of free `R`-modules `X̃` with differentials `D̃_k − ι(h_k)` and `S ⊗_R X̃ = F`.
#[derive(Clone, Debug)]
pub struct DerivedLift {
    datum: SquareZeroDatum,
    diffs: Vec<RingMatrix>,
    complex: ChainComplex,
    base: Resolution,
}

impl DerivedLift {
    pub fn datum(&self) -> &SquareZeroDatum {
        &self.datum
    }

    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    /// The resolution over `S` this lift reduces to.
    pub fn base(&self) -> &Resolution {
        &self.base
    }

    pub fn diff(&self, k: i64) -> RingMatrix {
        let lo = self.complex.lo();
        if k > lo && k <= self.complex.hi() {
            self.diffs[(k - lo - 1) as usize].clone()
        } else {
            let rank = |i: i64| self.base.rank(i);
            RingMatrix::zeros(self.datum.r().clone(), rank(k), rank(k - 1))
        }
    }

    /// `π(D'_k) = D_k` in every degree.
    pub fn reduces_to_base(&self) -> bool {
        (self.complex.lo() + 1..=self.complex.hi()).all(|k| self.diff(k).map_entries(self.datum.pi()) == self.base.diff(k))
    }

    /// The lowest homology, which for a module is the lifted module.
    pub fn bottom_homology(&self) -> FinModule {
        self.complex.homology(self.complex.lo()).module
    }
}

/// Corrects the lifted differentials by a null homotopy given as a degree-1 cochain of
/// `Hom(F, J ⊗ F)`.
pub fn derived_lift(ob: &ObstructionCocycle, h: &[Int]) -> Result<DerivedLift, ObstructionError> {
    let lifted = ob.lifted();
    let d = lifted.datum();
    let res = lifted.base();
    let r = d.r().clone();
    let jr = d.j().rank();
    let hom = ob.hom();
    let mut diffs = Vec::new();
    for k in res.lo() + 1..=res.hi() {
        let tilde = lifted.tilde(k);
        let (rows, cols) = tilde.shape();
        let images = hom.images(1, h, k);
        let entries = (0..rows)
            .flat_map(|i| (0..cols).map(move |m| (i, m)))
            .map(|(i, m)| r.sub(tilde.get(i, m), &d.include(&images[i][m * jr..(m + 1) * jr])))
            .collect();
        diffs.push(RingMatrix::from_entries(r.clone(), rows, cols, entries));
    }
    for k in res.lo() + 2..=res.hi() {
        let i = (k - res.lo() - 1) as usize;
        if !diffs[i].mul(&diffs[i - 1]).is_zero() {
            return Err(ObstructionError::InternalInconsistency(format!("corrected differential squares to nonzero at {k}")));
        }
    }
    let terms = (res.lo()..=res.hi()).map(|k| FinModule::free(r.clone(), res.rank(k))).collect();
    let complex = ChainComplex::new(r, res.lo(), terms, diffs.iter().map(RingMatrix::to_int_matrix).collect())?;
    let out = DerivedLift { datum: d.clone(), diffs, complex, base: res.clone() };
    if !out.reduces_to_base() {
        return Err(ObstructionError::InternalInconsistency("lift does not reduce to the base resolution".into()));
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftClass {
    /// Coordinates in `Ext¹(X, J ⊗ X)` relative to the base point.
    #[serde(serialize_with = "crate::exactlin::serialize_ints")]
    pub coords: Elem,
    /// Homology of the lifted complex by degree.
    pub homology: BTreeMap<i64, String>,
    #[serde(skip)]
    pub lift: DerivedLift,
}

/// Checks that the classes form a torsor: differences of corrections land in the expected
/// classes and distinct coordinates give distinct lifts.
#[derive(Clone, Debug, Serialize)]
pub struct TorsorRecord {
    pub size: usize,
    pub differences_match: bool,
    pub free: bool,
    pub transitive: bool,
}

impl TorsorRecord {
    pub fn ok(&self) -> bool {
        self.differences_match && self.free && self.transitive
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftReport {
    pub resolution_ranks: Vec<usize>,
    pub certificate: crate::resolve::Certificate,
    pub ext2: AbGroup,
    #[serde(serialize_with = "crate::exactlin::serialize_ints")]
    pub obstruction_class: Elem,
    pub obstructed: bool,
    pub classical_ext2: Option<AbGroup>,
    pub classical_class_zero: Option<bool>,
    pub tor: TorCheck,
    /// `Ext¹(X, J ⊗ X)`, present when a lift exists and the group is certified.
    pub ext1: Option<AbGroup>,
    /// `Ext¹_S(M, J ⊗_S M)` computed from the module directly, for module inputs.
    pub classical_ext1: Option<AbGroup>,
    pub ext1_certified: bool,
    pub periodic_solution: bool,
    pub classes: Vec<LiftClass>,
    /// One lift from a periodic null homotopy, when lifts exist but `Ext¹` is not certified and
    /// classes are not enumerated.
    pub witness: Option<LiftClass>,
    pub torsor: Option<TorsorRecord>,
    /// Lowest degree carrying nonzero homology of the input.
    pub connectivity: Option<i64>,
}

impl LiftReport {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }
}

fn connectivity(x: &ChainComplex) -> Option<i64> {
    (x.lo()..=x.hi()).find(|&k| !x.homology(k).module.is_zero_module())
}

/// Resolves `X` to `length` past its top, computes the obstruction and, when it vanishes,
/// every lift up to equivalence (at most `cap` of them).
pub fn classify_lifts(d: &SquareZeroDatum, x: &ChainComplex, length: usize, cap: usize) -> Result<LiftReport, ObstructionError> {
    let res = free_resolution(x, length, Strategy::Greedy)?;
    let lifted = lift_differentials(d, &res)?;
    let ob = obstruction_cocycle(&lifted)?;
    let classical = ob.classical().cloned();
    let classical_ext1 = classical_ext1(d, &res)?;
    let mut report = LiftReport {
        resolution_ranks: res.ranks().to_vec(),
        certificate: res.certificate().clone(),
        ext2: ob.ext2_group().clone(),
        obstruction_class: ob.class().to_vec(),
        obstructed: !ob.class_is_zero(),
        classical_ext2: classical.as_ref().map(|c| c.group.clone()),
        classical_class_zero: classical.as_ref().map(|c| c.is_zero),
        tor: tor_check(d, &res),
        ext1: None,
        classical_ext1,
        ext1_certified: false,
        periodic_solution: false,
        classes: Vec::new(),
        witness: None,
        torsor: None,
        connectivity: connectivity(x),
    };
    let nh = match solve_null_homotopies(&ob) {
        Ok(nh) => nh,
        Err(ObstructionError::NoSolution) => return Ok(report),
        Err(e) => return Err(e),
    };
    report.ext1_certified = nh.certified;
    report.periodic_solution = nh.periodic;
    if !nh.certified {
        // The truncated H¹ differs from Ext¹ here; keep only the lift the solution gives.
        let lift = derived_lift(&ob, &nh.h0)?;
        report.witness = Some(LiftClass { coords: Vec::new(), homology: lift.complex().homology_summary(), lift });
        return Ok(report);
    }
    report.ext1 = Some(nh.h1.group().clone());
    let coords = nh
        .h1
        .enumerate(cap)
        .ok_or_else(|| ObstructionError::Precondition(format!("more than {cap} lift classes")))?;
    for c in &coords {
        let h = nh.representative(c, ob.hom());
        let lift = derived_lift(&ob, &h)?;
        report.classes.push(LiftClass { coords: c.clone(), homology: lift.complex().homology_summary(), lift });
    }
    report.torsor = Some(torsor_record(&nh, ob.hom(), &coords));
    Ok(report)
}

fn torsor_record(nh: &NullHomotopies, hom: &HomComplex, coords: &[Elem]) -> TorsorRecord {
    let m1 = hom.moduli(1);
    let reps: Vec<Elem> = coords.iter().map(|c| nh.representative(c, hom)).collect();
    let mut differences_match = true;
    let mut seen = std::collections::BTreeSet::new();
    for (a, ha) in coords.iter().zip(&reps) {
        for (b, hb) in coords.iter().zip(&reps) {
            let diff = reduced(hb.iter().zip(ha).map(|(x, y)| x - y).collect(), &m1);
            let expected: Vec<Int> = b.iter().zip(a).map(|(x, y)| x - y).collect();
            let got = nh.h1.coords(&diff);
            let want = nh.h1.coords(&nh.h1.element(&expected));
            differences_match &= got.is_some() && got == want;
        }
        seen.insert(nh.h1.coords(&reduced(ha.iter().zip(&nh.h0).map(|(x, y)| x - y).collect(), &m1)));
    }
    let order = nh.h1.group().order().and_then(|o| usize::try_from(o).ok());
    TorsorRecord {
        size: coords.len(),
        differences_match,
        free: seen.len() == coords.len(),
        transitive: order == Some(coords.len()),
    }
}

/// `Ext¹_S(M, J ⊗_S M)` straight from the module, when the input is a module in degree 0.
fn classical_ext1(d: &SquareZeroDatum, res: &Resolution) -> Result<Option<AbGroup>, ObstructionError> {
    let x = res.target();
    if x.bounds() != (0, 0) || res.hi() < 2 {
        return Ok(None);
    }
    let t = TensorProduct::new(d.j(), x.term(0))?;
    let ext = hyper_ext(res, &ChainComplex::concentrated(t.module().clone(), 0), 1)?;
    Ok(Some(ext.group().clone()))
}
