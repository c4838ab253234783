//! Command execution, generic over the coefficient field.

use crate::input::{Input, ModuleSpec};
use crate::output::{Check, GeneratorCount, Report, Summand, Table};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use thiserror::Error;
use toric_tate::bgg::{betti_table, BGGWindowSpec};
use toric_tate::cohomology::{
    check_betti_bounds_multigraded, check_betti_bounds_weighted, cohomology_table_fast, is_0_regular,
    is_deg_i_0_regular, local_cohomology, saturating_truncation, sheaf_cohomology_table, CohomologyError, ExpBound,
};
use toric_tate::diagonal::{
    build_f, build_f_prime_weighted, check_acyclicity, check_h0_diagonal, hirzebruch1_example,
    hirzebruch1_generators, BiWindow, DiagComplex, DiagError,
};
use toric_tate::exterior::CohomologyTable;
use toric_tate::linalg::Field;
use toric_tate::smodule::{Presentation, SModuleError};
use toric_tate::tate::{fm_line_bundle, fm_transform, tate_weighted, TateError, TateResult};
use toric_tate::toric::{Degree, ToricError, ToricStack, Window};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("window too small: {0}")]
    Window(String),
    #[error(transparent)]
    Other(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Window(_) => 4,
            CliError::Other(_) => 1,
        }
    }
}

impl From<CohomologyError> for CliError {
    fn from(e: CohomologyError) -> Self {
        match e {
            CohomologyError::NoStabilization(..) => CliError::Window(e.to_string()),
            CohomologyError::Precondition(s) => CliError::Precondition(s),
            CohomologyError::Toric(t) => CliError::Precondition(t.to_string()),
        }
    }
}

impl From<TateError> for CliError {
    fn from(e: TateError) -> Self {
        match e {
            TateError::Precondition(s) => CliError::Precondition(s),
            TateError::Window(s) => CliError::Window(s),
            TateError::Cohomology(c) => c.into(),
            TateError::Toric(t) => CliError::Precondition(t.to_string()),
            e => CliError::Other(anyhow::Error::new(e)),
        }
    }
}

impl From<DiagError> for CliError {
    fn from(e: DiagError) -> Self {
        CliError::Precondition(e.to_string())
    }
}

impl From<SModuleError> for CliError {
    fn from(e: SModuleError) -> Self {
        CliError::Schema(e.to_string())
    }
}

impl From<ToricError> for CliError {
    fn from(e: ToricError) -> Self {
        CliError::Schema(e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Cohomology { d: Option<i64> },
    Tate { d: Option<i64> },
    Betti,
    Oracle { local: bool },
    Diagonal { verify: bool },
    Regularity { dmax: Option<i64>, regularity_window: Option<Window> },
    Verify { random: usize, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct Job {
    pub input: Input,
    pub module: Option<String>,
    pub window: Option<Window>,
    pub command: Command,
}

/// Parse `lo:hi[,lo:hi...]`, one range per class group coordinate.
pub fn parse_window(s: &str, r: usize) -> Result<Window, CliError> {
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for part in s.split(',') {
        let (a, b) = part.split_once(':').ok_or_else(|| CliError::Schema(format!("--window: expected lo:hi, got {part:?}")))?;
        let parse = |t: &str| t.trim().parse::<i64>().map_err(|_| CliError::Schema(format!("--window: {t:?} is not an integer")));
        lo.push(parse(a)?);
        hi.push(parse(b)?);
    }
    if lo.len() != r {
        return Err(CliError::Schema(format!("--window: {} ranges given, cl_rank is {r}", lo.len())));
    }
    Ok(Window::new(lo, hi)?)
}

fn cube(r: usize, lo: i64, hi: i64) -> Window {
    Window { lo: vec![lo; r], hi: vec![hi; r] }
}

/// Per coordinate, the sum of |deg x_i|.
fn pad(x: &ToricStack) -> Vec<i64> {
    (0..x.r).map(|c| x.var_degrees.iter().map(|d| d.0[c].abs()).sum()).collect()
}

fn bound() -> ExpBound {
    ExpBound::default()
}

impl Job {
    fn x(&self) -> &ToricStack {
        &self.input.x
    }

    fn module_spec(&self) -> Result<&ModuleSpec, CliError> {
        let mods = &self.input.modules;
        match &self.module {
            Some(name) => mods.get(name).ok_or_else(|| CliError::Schema(format!("--module: no module named {name:?}"))),
            None if mods.len() == 1 => Ok(mods.values().next().expect("one module")),
            None => mods.get("M").ok_or_else(|| {
                let names: Vec<&String> = mods.keys().collect();
                CliError::Schema(format!("choose a module with --module among {names:?}"))
            }),
        }
    }

    fn window_or(&self, default: Window) -> Window {
        self.window.clone().unwrap_or(default)
    }

    fn table_window(&self) -> Window {
        let r = self.x().r;
        self.window_or(if r == 1 { cube(1, -8, 8) } else { cube(r, -1, 1) })
    }

    /// Module window for R(M): wide enough that the Betti columns are safe.
    fn module_window(&self, spec: &ModuleSpec) -> Window {
        let x = self.x();
        if x.r != 1 {
            let p = pad(x);
            return self.window_or(Window { lo: p.iter().map(|v| -v).collect(), hi: p });
        }
        let w = x.theta_of(&x.w());
        let th = |d: &Degree| x.theta_of(&(d - &spec.twist));
        let degs = spec.generators.iter().chain(spec.relations.iter().map(|r| &r.degree)).chain(spec.truncate.iter());
        let lo = spec.generators.iter().chain(spec.truncate.iter()).map(th).min().unwrap_or(0);
        let hi = degs.map(th).max().unwrap_or(0);
        self.window_or(Window::interval(lo - w - 1, hi + 2 * w + 2))
    }
}

pub fn execute<K: Field>(k: &K, job: &Job) -> Result<Report, CliError> {
    match &job.command {
        Command::Cohomology { d } => cohomology(k, job, *d),
        Command::Tate { d } => tate(k, job, *d),
        Command::Betti => betti(k, job),
        Command::Oracle { local } => oracle(k, job, *local),
        Command::Diagonal { verify } => diagonal(k, job, *verify),
        Command::Regularity { dmax, regularity_window } => regularity(k, job, *dmax, regularity_window.clone()),
        Command::Verify { random, seed } => verify(k, job, *random, *seed),
    }
}

/// The Tate resolution of the selected module and a name for the construction used.
fn tate_result<K: Field>(k: &K, job: &Job, spec: &ModuleSpec, win: &Window, d: Option<i64>) -> Result<(TateResult<K>, String), CliError> {
    let x = job.x();
    if x.r == 1 {
        let pres = spec.presentation(k, x)?;
        let trunc = spec.truncation().map(|t| x.theta_of(&t));
        let d = d.unwrap_or_else(|| saturating_truncation(k, x, &pres, win).max(trunc.unwrap_or(i64::MIN)));
        return Ok((tate_weighted(k, x, &pres, win, Some(d))?, "weighted".into()));
    }
    if let Some(b) = spec.line_bundle() {
        return Ok((fm_line_bundle(k, x, &b, win, bound())?, "fm line bundle".into()));
    }
    let m = spec.build(k, x)?;
    Ok((fm_transform(&*m, win, bound())?, "fm".into()))
}

fn cohomology<K: Field>(k: &K, job: &Job, d: Option<i64>) -> Result<Report, CliError> {
    let spec = job.module_spec()?;
    let win = job.table_window();
    let x = job.x();
    let (table, construction) = if x.r == 1 {
        // Truncation does not change the sheaf.
        let pres = spec.presentation(k, x)?;
        (cohomology_table_fast(k, x, &pres, &win, d)?, "weighted".to_string())
    } else {
        let (t, c) = tate_result(k, job, spec, &win, d)?;
        (t.table, c)
    };
    Ok(Report::Cohomology { module: spec.name.clone(), construction, table: Table::from_cohomology(&win, &table) })
}

fn tate<K: Field>(k: &K, job: &Job, d: Option<i64>) -> Result<Report, CliError> {
    let spec = job.module_spec()?;
    let win = job.table_window();
    let (t, construction) = tate_result(k, job, spec, &win, d)?;
    let mut counts: BTreeMap<(i64, Degree), usize> = BTreeMap::new();
    for g in t.generators_in_window() {
        *counts.entry((g.u, g.c)).or_default() += 1;
    }
    let generators = counts.into_iter().map(|((u, c), count)| GeneratorCount { c: c.0, u, count }).collect();
    Ok(Report::Tate { module: spec.name.clone(), construction, generators, table: Table::from_cohomology(&win, &t.table) })
}

fn betti<K: Field>(k: &K, job: &Job) -> Result<Report, CliError> {
    let spec = job.module_spec()?;
    let x = job.x();
    let m = spec.build(k, x)?;
    let mw = job.module_window(spec);
    let b = betti_table(&*m, &BGGWindowSpec::new(x, mw.clone()));
    Ok(Report::Betti { module: spec.name.clone(), table: Table::new(&mw, b) })
}

fn oracle<K: Field>(k: &K, job: &Job, local: bool) -> Result<Report, CliError> {
    let spec = job.module_spec()?;
    let x = job.x();
    let m = spec.build(k, x)?;
    let win = job.table_window();
    let pts = win.points();
    let table = if local {
        let mut t = CohomologyTable::default();
        for a in &pts {
            for (i, v) in local_cohomology(&*m, a, bound())?.into_iter().enumerate() {
                t.add(i as i64, a.clone(), v);
            }
        }
        t
    } else {
        sheaf_cohomology_table(&*m, &pts, bound())?
    };
    Ok(Report::Oracle { module: spec.name.clone(), local, table: Table::from_cohomology(&win, &table) })
}

fn summands<K: Field>(c: &DiagComplex<K>) -> Vec<Vec<Summand>> {
    c.terms
        .iter()
        .map(|t| t.iter().map(|g| Summand { a: g.a.0.clone(), b: c.b(g).0, set: g.set() }).collect())
        .collect()
}

fn is_hirzebruch1(x: &ToricStack) -> bool {
    x.var_degrees == ToricStack::hirzebruch(1).var_degrees
}

fn diagonal<K: Field>(k: &K, job: &Job, verify: bool) -> Result<Report, CliError> {
    let x = job.x();
    if is_hirzebruch1(x) && job.window.is_none() {
        let complex = "F' on the Hirzebruch surface of type 1".to_string();
        if !verify {
            let c = DiagComplex::koszul(k, x, hirzebruch1_generators())?;
            return Ok(Report::Diagonal { complex, terms: summands(&c), checks: Vec::new() });
        }
        let (c, rep) = hirzebruch1_example(k)?;
        let first = rep.acyclic.failures.first().map(|f| format!("; {f}")).unwrap_or_default();
        let checks = vec![
            Check::new("F'_1 -> F'_0 equals the printed matrix", rep.matrix_matches, ""),
            Check::new("d^2 = 0 on [0,4]^2 x [0,4]^2", rep.square_zero, ""),
            Check::new(
                "H_i = 0 for i > 0 on [0,4]^2 x [0,4]^2",
                rep.acyclic.ok(),
                format!("{} bidegrees{first}", rep.acyclic.checked),
            ),
            Check::new(
                "dim H_0 = dim S_(d+d') on [2,4]^2 x [2,4]^2",
                rep.h0.ok(),
                format!("{} bidegrees", rep.h0.checked),
            ),
        ];
        return Ok(Report::Diagonal { complex, terms: summands(&c), checks });
    }
    let r = x.r;
    let win = job.window_or(if r == 1 { cube(1, 0, 6) } else { cube(r, 0, 4) });
    let bw = BiWindow::square(win.clone());
    let (c, complex) = if r == 1 {
        (build_f_prime_weighted(k, x)?, "F' (b < w - a)".to_string())
    } else {
        (build_f(k, x, &bw)?, "F restricted to the window".to_string())
    };
    let mut checks = Vec::new();
    if verify {
        let rep = check_acyclicity(&c, &bw);
        let first = rep.failures.first().map(|f| format!("; {f}")).unwrap_or_default();
        checks.push(Check::new("H_i = 0 for i > 0", rep.ok(), format!("{} bidegrees{first}", rep.checked)));
        let h0 = check_h0_diagonal(&c, &bw);
        let detail = match h0.mismatches.first() {
            Some((e, got, want)) => format!("{} bidegrees; at {e}: {got} vs {want}", h0.checked),
            None => format!("{} bidegrees", h0.checked),
        };
        checks.push(Check::new("dim H_0 = dim S_(d+d')", h0.ok(), detail));
    }
    Ok(Report::Diagonal { complex, terms: summands(&c), checks })
}

fn regularity<K: Field>(k: &K, job: &Job, dmax: Option<i64>, rw: Option<Window>) -> Result<Report, CliError> {
    let spec = job.module_spec()?;
    let x = job.x();
    let m = spec.build(k, x)?;
    let bspec = BGGWindowSpec::new(x, job.module_window(spec));
    let mut checks = Vec::new();
    if x.r == 1 {
        let dmax = dmax.unwrap_or(2 * x.theta_of(&x.w()));
        let reg = is_0_regular(&*m, dmax, bound())?;
        checks.push(Check::new("0-regular", reg, format!("checked up to degree {}", dmax + 2)));
        if reg {
            let rep = check_betti_bounds_weighted(&*m, &bspec, dmax, bound())?;
            checks.push(Check::new("Betti numbers in the bounded region", rep.ok(), bound_detail(&rep.checked, &rep.violations)));
        }
    } else {
        let rw = rw.unwrap_or_else(|| cube(x.r, -3, 3));
        if x.primitive.is_empty() {
            return Err(CliError::Precondition("no primitive collections in the input".into()));
        }
        for pc in &x.primitive {
            let set: Vec<&str> = pc.vars.iter().map(|&i| job.input.names[i].as_str()).collect();
            let set = set.join(",");
            let reg = is_deg_i_0_regular(&*m, &pc.vars, &rw, bound())?;
            checks.push(Check::new(format!("deg_I 0-regular for I = {{{set}}}"), reg, ""));
            if reg {
                let rep = check_betti_bounds_multigraded(&*m, &pc.vars, &bspec, &rw, bound())?;
                checks.push(Check::new(
                    format!("Betti numbers within the deg_I bounds for I = {{{set}}}"),
                    rep.ok(),
                    bound_detail(&rep.checked, &rep.violations),
                ));
            }
        }
    }
    Ok(Report::Regularity { module: spec.name.clone(), checks })
}

fn bound_detail(checked: &[(i64, Degree)], violations: &[(i64, Degree)]) -> String {
    let mut s = format!("{} nonzero Betti numbers", checked.len());
    if let Some((i, a)) = violations.first() {
        s.push_str(&format!(", first violation beta_({i},{a})"));
    }
    s
}

/// Degrees of `win` where the two tables differ, over i = 0..=top.
fn disagreements(a: &CohomologyTable, b: &CohomologyTable, win: &Window, top: i64) -> Vec<(i64, Degree)> {
    let mut out = Vec::new();
    for d in win.points() {
        for i in 0..=top {
            if a.get(i, &d) != b.get(i, &d) {
                out.push((i, d.clone()));
            }
        }
    }
    out
}

fn compare_check(name: String, fast: &CohomologyTable, oracle: &CohomologyTable, win: &Window, top: i64) -> Check {
    let bad = disagreements(fast, oracle, win, top);
    let detail = match bad.first() {
        None => format!("{} degrees agree", win.points().len()),
        Some((i, a)) => format!("{} disagreements, first H^{i} at {a}: {} vs {}", bad.len(), fast.get(*i, a), oracle.get(*i, a)),
    };
    Check::new(name, bad.is_empty(), detail)
}

fn verify<K: Field>(k: &K, job: &Job, random: usize, seed: u64) -> Result<Report, CliError> {
    let spec = job.module_spec()?;
    let x = job.x();
    let win = job.table_window();
    let top = x.cover.len() as i64;
    let m = spec.build(k, x)?;
    let oracle = sheaf_cohomology_table(&*m, &win.points(), bound())?;
    let fast = if x.r == 1 {
        cohomology_table_fast(k, x, &spec.presentation(k, x)?, &win, None)?
    } else {
        tate_result(k, job, spec, &win, None)?.0.table
    };
    let mut checks = vec![compare_check(format!("{} = Čech oracle", spec.name), &fast, &oracle, &win, top)];
    if random > 0 {
        if x.r != 1 {
            return Err(CliError::Precondition("--random needs a Z-graded stack".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = x.nvars();
        for _ in 0..random {
            let count = rng.gen_range(1..=3);
            let mut monos: Vec<Vec<u32>> = (0..count)
                .map(|_| (0..n).map(|_| rng.gen_range(0..3)).collect::<Vec<u32>>())
                .filter(|m| m.iter().any(|&e| e > 0))
                .collect();
            monos.sort();
            monos.dedup();
            let pres = Presentation::monomial_quotient(k, x, &monos)?;
            let lazy = toric_tate::smodule::LazyModule::new(k, x, &pres);
            let oracle = sheaf_cohomology_table(&lazy, &win.points(), bound())?;
            let fast = cohomology_table_fast(k, x, &pres, &win, None)?;
            checks.push(compare_check(format!("S/{monos:?} = Čech oracle"), &fast, &oracle, &win, top));
        }
    }
    Ok(Report::Verify { module: spec.name.clone(), checks })
}
