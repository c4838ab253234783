//! The JSON input document and its validation.

use serde::Deserialize;
use std::collections::BTreeMap;
use toric_tate::linalg::{Field, PrimeField, Rationals};
use toric_tate::smodule::{GeneratedTruncation, GradedModule, LazyModule, Mono, Poly, Presentation, SModuleError, Threshold};
use toric_tate::toric::{Degree, PrimitiveCollection, ToricError, ToricStack};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub field: FieldDoc,
    pub cl_rank: usize,
    pub variables: Vec<VariableDoc>,
    pub irrelevant: Vec<Vec<usize>>,
    #[serde(default)]
    pub cover: Option<Vec<Vec<usize>>>,
    pub theta: Vec<i64>,
    #[serde(default)]
    pub effective_cone: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    pub primitive_collections: Vec<CollectionDoc>,
    #[serde(default)]
    pub modules: BTreeMap<String, ModuleDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDoc {
    pub prime: Option<u64>,
    pub rationals: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableDoc {
    pub name: String,
    pub degree: Vec<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollectionDoc {
    pub vars: Vec<usize>,
    #[serde(rename = "deg_I")]
    pub deg_i: Vec<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleDoc {
    pub generators: Vec<GeneratorDoc>,
    #[serde(default)]
    pub relations: Vec<RelationDoc>,
    /// M_{>=d}: a theta threshold when r = 1, the submodule generated in degree d otherwise.
    #[serde(default)]
    pub truncate: Option<Vec<i64>>,
    /// Applied after truncation.
    #[serde(default)]
    pub twist: Option<Vec<i64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDoc {
    pub degree: Vec<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationDoc {
    pub degree: Vec<i64>,
    pub entries: Vec<TermDoc>,
}

/// `[coeff, exponents]` on generator 0, or `[coeff, exponents, generator]`.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum TermDoc {
    OnFirst(i64, Vec<u32>),
    On(i64, Vec<u32>, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldChoice {
    Prime(u64),
    Rationals,
}

#[derive(Clone, Debug)]
pub struct Relation {
    pub degree: Degree,
    /// (coefficient, exponents, generator)
    pub terms: Vec<(i64, Mono, usize)>,
}

#[derive(Clone, Debug)]
pub struct ModuleSpec {
    pub name: String,
    pub generators: Vec<Degree>,
    pub relations: Vec<Relation>,
    pub truncate: Option<Degree>,
    pub twist: Degree,
}

#[derive(Clone, Debug)]
pub struct Input {
    pub field: FieldChoice,
    pub x: ToricStack,
    pub names: Vec<String>,
    pub modules: BTreeMap<String, ModuleSpec>,
}

fn degree(path: &str, v: &[i64], r: usize) -> Result<Degree, String> {
    if v.len() != r {
        return Err(format!("{path}: degree has length {}, expected cl_rank = {r}", v.len()));
    }
    Ok(Degree(v.to_vec()))
}

fn check_indices(path: &str, sets: &[Vec<usize>], nv: usize) -> Result<(), String> {
    for (j, s) in sets.iter().enumerate() {
        if s.is_empty() {
            return Err(format!("{path}[{j}]: empty index list"));
        }
        if let Some(&bad) = s.iter().find(|&&i| i >= nv) {
            return Err(format!("{path}[{j}]: variable index {bad} out of range (there are {nv} variables)"));
        }
    }
    Ok(())
}

/// Parse and validate a document. Errors are schema errors addressed by
/// line/column or by field path.
pub fn parse_input(text: &str) -> Result<Input, String> {
    let doc: Document = serde_json::from_str(text).map_err(|e| format!("malformed document: {e}"))?;
    let field = match (doc.field.prime, doc.field.rationals) {
        (Some(p), None) => {
            PrimeField::new(p).map_err(|e| format!("field.prime: {e}"))?;
            FieldChoice::Prime(p)
        }
        (None, Some(true)) => FieldChoice::Rationals,
        _ => return Err("field: give exactly one of {\"prime\": p} or {\"rationals\": true}".into()),
    };
    let r = doc.cl_rank;
    if r == 0 {
        return Err("cl_rank: must be at least 1".into());
    }
    if doc.theta.len() != r {
        return Err(format!("theta: length {}, expected cl_rank = {r}", doc.theta.len()));
    }
    if doc.variables.is_empty() {
        return Err("variables: at least one variable is required".into());
    }
    let mut degs = Vec::new();
    let mut names = Vec::new();
    for (i, v) in doc.variables.iter().enumerate() {
        let d = degree(&format!("variables[{i}].degree"), &v.degree, r)?;
        let t: i64 = d.0.iter().zip(&doc.theta).map(|(a, b)| a * b).sum();
        if t <= 0 {
            return Err(format!(
                "variables[{i}] ({}): theta takes the value {t} on its degree; the grading theta must be positive on every variable",
                v.name
            ));
        }
        degs.push(d);
        names.push(v.name.clone());
    }
    let nv = degs.len();
    check_indices("irrelevant", &doc.irrelevant, nv)?;
    if let Some(c) = &doc.cover {
        check_indices("cover", c, nv)?;
    }
    let eff = match &doc.effective_cone {
        None => None,
        Some(gens) => Some(
            gens.iter()
                .enumerate()
                .map(|(j, g)| degree(&format!("effective_cone[{j}]"), g, r))
                .collect::<Result<Vec<_>, _>>()?,
        ),
    };
    let mut pcs = Vec::new();
    for (j, pc) in doc.primitive_collections.iter().enumerate() {
        let path = format!("primitive_collections[{j}]");
        check_indices(&format!("{path}.vars"), std::slice::from_ref(&pc.vars), nv)?;
        if pc.deg_i.len() != nv {
            return Err(format!("{path}.deg_I: length {}, expected {nv} (one value per variable)", pc.deg_i.len()));
        }
        for (l, &v) in pc.deg_i.iter().enumerate() {
            let inside = pc.vars.contains(&l);
            if inside && v <= 0 {
                return Err(format!("{path}.deg_I[{l}]: must be positive on the variables of the collection, got {v}"));
            }
            if !inside && v > 0 {
                return Err(format!("{path}.deg_I[{l}]: must be non-positive outside the collection, got {v}"));
            }
        }
        pcs.push(PrimitiveCollection { vars: pc.vars.clone(), deg_i: pc.deg_i.clone() });
    }
    let x = ToricStack::new(degs, doc.irrelevant.clone(), doc.cover.clone(), doc.theta.clone(), eff, pcs)
        .map_err(|e: ToricError| format!("stack: {e}"))?;
    let mut modules = BTreeMap::new();
    for (name, m) in &doc.modules {
        modules.insert(name.clone(), module_spec(&x, name, m)?);
    }
    Ok(Input { field, x, names, modules })
}

fn module_spec(x: &ToricStack, name: &str, m: &ModuleDoc) -> Result<ModuleSpec, String> {
    let r = x.r;
    let path = format!("modules.{name}");
    if m.generators.is_empty() {
        return Err(format!("{path}.generators: at least one generator is required"));
    }
    let generators = m
        .generators
        .iter()
        .enumerate()
        .map(|(i, g)| degree(&format!("{path}.generators[{i}].degree"), &g.degree, r))
        .collect::<Result<Vec<_>, _>>()?;
    let mut relations = Vec::new();
    for (j, rel) in m.relations.iter().enumerate() {
        let rp = format!("{path}.relations[{j}]");
        let d = degree(&format!("{rp}.degree"), &rel.degree, r)?;
        let mut terms = Vec::new();
        for (t, term) in rel.entries.iter().enumerate() {
            let (c, e, g) = match term {
                TermDoc::OnFirst(c, e) => (*c, e.clone(), 0),
                TermDoc::On(c, e, g) => (*c, e.clone(), *g),
            };
            if e.len() != x.nvars() {
                return Err(format!("{rp}.entries[{t}]: exponent vector of length {}, expected {}", e.len(), x.nvars()));
            }
            if g >= generators.len() {
                return Err(format!("{rp}.entries[{t}]: generator index {g} out of range"));
            }
            terms.push((c, e, g));
        }
        relations.push(Relation { degree: d, terms });
    }
    let truncate = m.truncate.as_ref().map(|t| degree(&format!("{path}.truncate"), t, r)).transpose()?;
    let twist = match &m.twist {
        Some(t) => degree(&format!("{path}.twist"), t, r)?,
        None => Degree::zero(r),
    };
    let spec = ModuleSpec { name: name.to_string(), generators, relations, truncate, twist };
    spec.presentation(&Rationals, x).map_err(|e| match e {
        SModuleError::Inhomogeneous(_, j, d) => {
            format!("{path}.relations[{j}]: entries are not homogeneous of the expected degree {d}")
        }
        e => format!("{path}: {e}"),
    })?;
    Ok(spec)
}

impl ModuleSpec {
    /// The presentation of M(twist); truncation is applied separately.
    pub fn presentation<K: Field>(&self, k: &K, x: &ToricStack) -> Result<Presentation<K::Elem>, SModuleError> {
        let g = self.generators.len();
        let mut matrix = vec![vec![Poly::zero(); self.relations.len()]; g];
        for (j, rel) in self.relations.iter().enumerate() {
            for gi in 0..g {
                let terms: Vec<(i64, Vec<u32>)> =
                    rel.terms.iter().filter(|t| t.2 == gi).map(|(c, e, _)| (*c, e.clone())).collect();
                matrix[gi][j] = Poly::from_i64(k, &terms);
            }
        }
        let gens = self.generators.iter().map(|d| d - &self.twist).collect();
        let rels = self.relations.iter().map(|r| &r.degree - &self.twist).collect();
        Presentation::new(x, gens, rels, matrix)
    }

    /// Whether this is S(-g) for a single g, possibly twisted.
    pub fn line_bundle(&self) -> Option<Degree> {
        (self.generators.len() == 1 && self.relations.is_empty() && self.truncate.is_none())
            .then(|| &self.twist - &self.generators[0])
    }

    /// The truncation degree in the twisted grading.
    pub fn truncation(&self) -> Option<Degree> {
        self.truncate.as_ref().map(|d| d - &self.twist)
    }

    pub fn build<K: Field>(&self, k: &K, x: &ToricStack) -> Result<Box<dyn GradedModule<K>>, SModuleError> {
        let lazy = LazyModule::new(k, x, &self.presentation(k, x)?);
        Ok(match self.truncation() {
            None => Box::new(lazy),
            Some(d) if x.r == 1 => Box::new(lazy.truncate(Threshold::Theta(x.theta_of(&d)))),
            Some(d) => Box::new(GeneratedTruncation::new(lazy, d, Degree::zero(x.r))),
        })
    }
}
