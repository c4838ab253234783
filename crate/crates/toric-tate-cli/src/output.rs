//! Reports printed by the commands, as text tables or JSON.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt::Write;
use toric_tate::exterior::CohomologyTable;
use toric_tate::toric::{Degree, Window};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowOut {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl From<&Window> for WindowOut {
    fn from(w: &Window) -> Self {
        WindowOut { lo: w.lo.clone(), hi: w.hi.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub i: i64,
    pub degree: Vec<i64>,
    pub dim: usize,
}

/// Nonzero entries of a table indexed by (i, degree).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub window: WindowOut,
    pub entries: Vec<Entry>,
}

impl Table {
    pub fn new(window: &Window, entries: impl IntoIterator<Item = ((i64, Degree), usize)>) -> Self {
        let mut entries: Vec<Entry> =
            entries.into_iter().filter(|(_, v)| *v > 0).map(|((i, a), dim)| Entry { i, degree: a.0, dim }).collect();
        entries.sort_by(|a, b| (a.i, &a.degree).cmp(&(b.i, &b.degree)));
        Table { window: window.into(), entries }
    }

    pub fn from_cohomology(window: &Window, t: &CohomologyTable) -> Self {
        Self::new(window, t.entries.iter().map(|(k, v)| (k.clone(), *v)))
    }

    pub fn get(&self, i: i64, a: &[i64]) -> usize {
        self.entries.iter().find(|e| e.i == i && e.degree == a).map_or(0, |e| e.dim)
    }

    /// Rows are i, columns are the degrees of a rank-1 window. Other ranks
    /// are listed one entry per line.
    pub fn render(&self, rows_descending: bool) -> String {
        let mut out = String::new();
        if self.window.lo.len() != 1 {
            for e in &self.entries {
                let d: Vec<String> = e.degree.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(out, "{:>3}  ({})  {}", e.i, d.join(","), e.dim);
            }
            return out;
        }
        let (lo, hi) = (self.window.lo[0], self.window.hi[0]);
        let mut rows: BTreeSet<i64> = self.entries.iter().map(|e| e.i).collect();
        if rows.is_empty() {
            rows.insert(0);
        }
        let width = (lo..=hi)
            .map(|a| a.to_string().len())
            .chain(self.entries.iter().map(|e| e.dim.to_string().len()))
            .max()
            .unwrap_or(1)
            + 1;
        let _ = write!(out, "{:>4}", "");
        for a in lo..=hi {
            let _ = write!(out, "{a:>width$}");
        }
        out.push('\n');
        let order: Vec<i64> = if rows_descending { rows.into_iter().rev().collect() } else { rows.into_iter().collect() };
        for i in order {
            let _ = write!(out, "{i:>3}:");
            for a in lo..=hi {
                let v = self.get(i, &[a]);
                let cell = if v == 0 { ".".to_string() } else { v.to_string() };
                let _ = write!(out, "{cell:>width$}");
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), ok, detail: detail.into() }
    }
}

/// A free summand ω_E(c; u) with its multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorCount {
    pub c: Vec<i64>,
    pub u: i64,
    pub count: usize,
}

/// A summand S'(a, -a-b) of a term of the diagonal complex, from u^a e_I.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summand {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    pub set: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Report {
    Cohomology { module: String, construction: String, table: Table },
    Tate { module: String, construction: String, generators: Vec<GeneratorCount>, table: Table },
    Betti { module: String, table: Table },
    Oracle { module: String, local: bool, table: Table },
    Diagonal { complex: String, terms: Vec<Vec<Summand>>, checks: Vec<Check> },
    Regularity { module: String, checks: Vec<Check> },
    Verify { module: String, checks: Vec<Check> },
}

fn fmt_deg(d: &[i64]) -> String {
    if d.len() == 1 {
        d[0].to_string()
    } else {
        format!("({})", d.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
    }
}

fn render_checks(out: &mut String, checks: &[Check]) {
    for c in checks {
        let tag = if c.ok { "PASS" } else { "FAIL" };
        if c.detail.is_empty() {
            let _ = writeln!(out, "{tag}  {}", c.name);
        } else {
            let _ = writeln!(out, "{tag}  {}: {}", c.name, c.detail);
        }
    }
}

impl Report {
    /// Every check passed (reports without checks count as passing).
    pub fn ok(&self) -> bool {
        match self {
            Report::Diagonal { checks, .. } | Report::Regularity { checks, .. } | Report::Verify { checks, .. } => {
                checks.iter().all(|c| c.ok)
            }
            _ => true,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        match self {
            Report::Cohomology { module, construction, table } => {
                let _ = writeln!(out, "cohomology of {module} ({construction})");
                out.push_str(&table.render(true));
            }
            Report::Tate { module, construction, generators, table } => {
                let _ = writeln!(out, "Tate resolution of {module} ({construction})");
                for g in generators {
                    let _ = writeln!(out, "  ω_E({};{})^{}", fmt_deg(&g.c), g.u, g.count);
                }
                out.push_str(&table.render(true));
            }
            Report::Betti { module, table } => {
                let _ = writeln!(out, "Betti numbers of {module}: row i, column a holds beta_(i,a)");
                out.push_str(&table.render(false));
            }
            Report::Oracle { module, local, table } => {
                let what = if *local { "local cohomology" } else { "sheaf cohomology" };
                let _ = writeln!(out, "{what} of {module} (Čech)");
                out.push_str(&table.render(true));
            }
            Report::Diagonal { complex, terms, checks } => {
                let _ = writeln!(out, "{complex}");
                for (i, t) in terms.iter().enumerate() {
                    let parts: Vec<String> = t
                        .iter()
                        .map(|s| {
                            let a = fmt_deg(&s.a);
                            let ab: Vec<i64> = s.a.iter().zip(&s.b).map(|(x, y)| -x - y).collect();
                            format!("S'({a},{})", fmt_deg(&ab))
                        })
                        .collect();
                    let _ = writeln!(out, "  F_{i}: {} summands: {}", t.len(), parts.join(" + "));
                }
                render_checks(&mut out, checks);
            }
            Report::Regularity { module, checks } => {
                let _ = writeln!(out, "regularity of {module}");
                render_checks(&mut out, checks);
            }
            Report::Verify { module, checks } => {
                let _ = writeln!(out, "verification for {module}");
                render_checks(&mut out, checks);
            }
        }
        out
    }
}
