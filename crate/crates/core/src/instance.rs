//! TOML instance files: a square-zero datum and a module or complex over the quotient ring.

use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use crate::algebra::{
    extension_from_cocycle, split_square_zero, AlgebraMap, Bimodule, CocycleTables, FiniteAlgebra, SectionChoice,
    SquareZeroDatum,
};
use crate::exactlin::{Int, IntMatrix};
use crate::modcx::{ChainComplex, FinModule};

#[derive(Debug, thiserror::Error)]
pub enum InstanceError {
    #[error("cannot read {0}: {1}")]
    Io(String, std::io::Error),
    #[error("parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

fn invalid(path: &str, message: impl ToString) -> InstanceError {
    InstanceError::Invalid { path: path.to_string(), message: message.to_string() }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum RingSpec {
    Zmod { n: u64 },
    TruncPoly { p: u64, k: usize },
    UpperTriangular { p: u64 },
    Product { factors: Vec<RingSpec> },
    /// The total ring of a split extension.
    SplitExt { base: Box<RingSpec>, bimodule: BimoduleSpec },
    /// The total ring of an extension presented by a multiplicative cocycle.
    CocycleExt { base: Box<RingSpec>, bimodule: BimoduleSpec, cocycle: CocycleSpec },
    Raw { moduli: Vec<i64>, mul: Vec<Vec<Vec<i64>>>, unit: Vec<i64> },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum BimoduleSpec {
    Regular,
    /// `S/I` for the two-sided ideal generated by the listed elements.
    QuotientOfRegular { generators: Vec<Vec<i64>> },
    Raw { moduli: Vec<i64>, left: Vec<Vec<Vec<i64>>>, right: Vec<Vec<Vec<i64>>> },
}

/// Normalized cochains on element indices of the base ring (lexicographic order, last
/// coordinate fastest): an additive carry and a multiplicative correction. Omitted tables
/// are zero.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleSpec {
    #[serde(default)]
    pub additive: Vec<Vec<Vec<i64>>>,
    #[serde(default)]
    pub multiplicative: Vec<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExtensionSpec {
    Surjection { ring: RingSpec, quotient: RingSpec, map: Vec<Vec<i64>> },
    Split { base: RingSpec, bimodule: BimoduleSpec },
    Cocycle { base: RingSpec, bimodule: BimoduleSpec, cocycle: CocycleSpec },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModuleSpec {
    Free { rank: usize },
    /// The quotient of `S` by the left ideal generated by the listed elements.
    Quotient { generators: Vec<Vec<i64>> },
    Raw { moduli: Vec<i64>, action: Vec<Vec<Vec<i64>>> },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSpec {
    pub lo: i64,
    pub terms: Vec<ModuleSpec>,
    /// `d_{lo+1}, d_{lo+2}, …` as integer matrices, columns the images of source generators.
    #[serde(default)]
    pub differentials: Vec<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub extension: ExtensionSpec,
    pub module: Option<ModuleSpec>,
    pub complex: Option<ComplexSpec>,
    #[serde(default)]
    pub options: Options,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    pub resolution_length: Option<usize>,
    pub budget: Option<usize>,
}

/// A parsed and validated instance.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub description: String,
    pub datum: SquareZeroDatum,
    pub input: ChainComplex,
    pub options: Options,
}

impl Instance {
    pub fn from_path(path: &Path) -> Result<Self, InstanceError> {
        let text = std::fs::read_to_string(path).map_err(|e| InstanceError::Io(path.display().to_string(), e))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, InstanceError> {
        let file: InstanceFile = toml::from_str(text)?;
        file.build()
    }

    /// The input as a module when it is concentrated in degree 0.
    pub fn module(&self) -> Option<&FinModule> {
        (self.input.bounds() == (0, 0)).then(|| self.input.term(0))
    }

    pub fn with_section(&self, choice: SectionChoice) -> Instance {
        Instance { datum: self.datum.with_section(choice), ..self.clone() }
    }
}

fn ints(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| Int::from(x)).collect()
}

fn matrix(rows: &[Vec<i64>], n_rows: usize, n_cols: usize, path: &str) -> Result<IntMatrix, InstanceError> {
    if rows.len() != n_rows || rows.iter().any(|r| r.len() != n_cols) {
        return Err(invalid(path, format!("expected a {n_rows}x{n_cols} matrix")));
    }
    Ok(IntMatrix::from_big_rows(rows.iter().map(|r| ints(r)).collect(), n_cols))
}

fn build_ring(spec: &RingSpec, path: &str) -> Result<Arc<FiniteAlgebra>, InstanceError> {
    let ring = match spec {
        RingSpec::Zmod { n } => {
            if *n < 2 {
                return Err(invalid(path, "modulus must be at least 2"));
            }
            FiniteAlgebra::zmod(*n)
        }
        RingSpec::TruncPoly { p, k } => {
            if *p < 2 || *k < 1 {
                return Err(invalid(path, "need p ≥ 2 and k ≥ 1"));
            }
            FiniteAlgebra::trunc_poly(*p, *k)
        }
        RingSpec::UpperTriangular { p } => FiniteAlgebra::upper_triangular(*p),
        RingSpec::Product { factors } => {
            let mut it = factors.iter().enumerate();
            let (_, first) = it.next().ok_or_else(|| invalid(path, "product needs at least one factor"))?;
            let mut acc = (*build_ring(first, &format!("{path}.factors[0]"))?).clone();
            for (i, f) in it {
                acc = FiniteAlgebra::product(&acc, &*build_ring(f, &format!("{path}.factors[{i}]"))?);
            }
            acc
        }
        RingSpec::SplitExt { base, bimodule } => {
            let s = build_ring(base, &format!("{path}.base"))?;
            let b = build_bimodule(&s, bimodule, &format!("{path}.bimodule"))?;
            return Ok(split_square_zero(s, &b).r().clone());
        }
        RingSpec::CocycleExt { base, bimodule, cocycle } => {
            let s = build_ring(base, &format!("{path}.base"))?;
            let b = build_bimodule(&s, bimodule, &format!("{path}.bimodule"))?;
            return Ok(cocycle_datum(s, &b, cocycle, path)?.r().clone());
        }
        RingSpec::Raw { moduli, mul, unit } => {
            let mul = mul.iter().map(|row| row.iter().map(|e| ints(e)).collect()).collect();
            FiniteAlgebra::new(ints(moduli), mul, ints(unit)).map_err(|e| invalid(path, e))?
        }
    };
    Ok(Arc::new(ring))
}

fn build_bimodule(s: &Arc<FiniteAlgebra>, spec: &BimoduleSpec, path: &str) -> Result<Bimodule, InstanceError> {
    match spec {
        BimoduleSpec::Regular => Ok(Bimodule::regular(s.clone())),
        BimoduleSpec::QuotientOfRegular { generators } => {
            if generators.iter().any(|g| g.len() != s.rank()) {
                return Err(invalid(&format!("{path}.generators"), format!("elements need {} coordinates", s.rank())));
            }
            Ok(Bimodule::quotient_of_regular(s.clone(), &generators.iter().map(|g| ints(g)).collect::<Vec<_>>()))
        }
        BimoduleSpec::Raw { moduli, left, right } => {
            let n = moduli.len();
            let mats = |ms: &[Vec<Vec<i64>>], side: &str| -> Result<Vec<IntMatrix>, InstanceError> {
                ms.iter().enumerate().map(|(i, m)| matrix(m, n, n, &format!("{path}.{side}[{i}]"))).collect()
            };
            Bimodule::new(s.clone(), s.clone(), ints(moduli), mats(left, "left")?, mats(right, "right")?).map_err(|e| invalid(path, e))
        }
    }
}

fn cocycle_datum(s: Arc<FiniteAlgebra>, b: &Bimodule, spec: &CocycleSpec, path: &str) -> Result<SquareZeroDatum, InstanceError> {
    let mut tables = CocycleTables::zero(&s, b);
    let read = |t: &[Vec<Vec<i64>>]| -> Vec<Vec<Vec<Int>>> { t.iter().map(|row| row.iter().map(|e| ints(e)).collect()).collect() };
    if !spec.additive.is_empty() {
        tables.additive = read(&spec.additive);
    }
    if !spec.multiplicative.is_empty() {
        tables.multiplicative = read(&spec.multiplicative);
    }
    extension_from_cocycle(s, b, &tables).map_err(|e| invalid(&format!("{path}.cocycle"), e))
}

fn build_module(s: &Arc<FiniteAlgebra>, spec: &ModuleSpec, path: &str) -> Result<FinModule, InstanceError> {
    match spec {
        ModuleSpec::Free { rank } => Ok(FinModule::free(s.clone(), *rank)),
        ModuleSpec::Quotient { generators } => {
            if generators.iter().any(|g| g.len() != s.rank()) {
                return Err(invalid(&format!("{path}.generators"), format!("elements need {} coordinates", s.rank())));
            }
            Ok(FinModule::cyclic_quotient(s.clone(), &generators.iter().map(|g| ints(g)).collect::<Vec<_>>()))
        }
        ModuleSpec::Raw { moduli, action } => {
            let n = moduli.len();
            if action.len() != s.rank() {
                return Err(invalid(&format!("{path}.action"), format!("need one matrix per ring generator ({})", s.rank())));
            }
            let mats = action.iter().enumerate().map(|(i, m)| matrix(m, n, n, &format!("{path}.action[{i}]"))).collect::<Result<_, _>>()?;
            FinModule::new(s.clone(), ints(moduli), mats).map_err(|e| invalid(path, e))
        }
    }
}

impl InstanceFile {
    pub fn build(&self) -> Result<Instance, InstanceError> {
        let datum = match &self.extension {
            ExtensionSpec::Surjection { ring, quotient, map } => {
                let r = build_ring(ring, "extension.ring")?;
                let s = build_ring(quotient, "extension.quotient")?;
                let m = matrix(map, s.rank(), r.rank(), "extension.map")?;
                let pi = AlgebraMap::new(r, s, m).map_err(|e| invalid("extension.map", e))?;
                SquareZeroDatum::from_surjection(pi).map_err(|e| invalid("extension", e))?
            }
            ExtensionSpec::Split { base, bimodule } => {
                let s = build_ring(base, "extension.base")?;
                let b = build_bimodule(&s, bimodule, "extension.bimodule")?;
                split_square_zero(s, &b)
            }
            ExtensionSpec::Cocycle { base, bimodule, cocycle } => {
                let s = build_ring(base, "extension.base")?;
                let b = build_bimodule(&s, bimodule, "extension.bimodule")?;
                cocycle_datum(s, &b, cocycle, "extension")?
            }
        };
        let s = datum.s().clone();
        let input = match (&self.module, &self.complex) {
            (Some(m), None) => ChainComplex::concentrated(build_module(&s, m, "module")?, 0),
            (None, Some(c)) => {
                let terms: Vec<FinModule> = c
                    .terms
                    .iter()
                    .enumerate()
                    .map(|(i, t)| build_module(&s, t, &format!("complex.terms[{i}]")))
                    .collect::<Result<_, _>>()?;
                if c.differentials.len() + 1 != terms.len() {
                    return Err(invalid("complex.differentials", "need one fewer differential than terms"));
                }
                let diffs = c
                    .differentials
                    .iter()
                    .enumerate()
                    .map(|(i, d)| matrix(d, terms[i].rank(), terms[i + 1].rank(), &format!("complex.differentials[{i}]")))
                    .collect::<Result<_, _>>()?;
                ChainComplex::new(s, c.lo, terms, diffs).map_err(|e| invalid("complex", e))?
            }
            _ => return Err(invalid("module", "give exactly one of [module] and [complex]")),
        };
        Ok(Instance { name: self.name.clone(), description: self.description.clone(), datum, input, options: self.options.clone() })
    }
}
