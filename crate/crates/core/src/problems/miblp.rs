//! Bilevel MILP form of the coverage game, written as an LP-like text file
//! plus the auxiliary file that tells a bilevel solver which variables and
//! rows belong to the follower.
//!
//! ```text
//! min_x max_{y,z} sum_j p_j z_j
//!   s.t. sum_i y_i <= B
//!        z_j - sum_{i: j in J(i)} y_i <= 0    for all customers j
//!        y_i + x_i <= 1                       for all facilities i
//!        sum_i x_i <= k                       (leader)
//!        x, y, z binary
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::problems::WmcigInstance;

#[derive(Debug, Clone, PartialEq)]
pub struct MiblpRow {
    pub name: String,
    /// `(variable id, coefficient)`, variable ids ascending.
    pub terms: Vec<(usize, f64)>,
    pub rhs: f64,
    /// Follower rows are listed in the auxiliary file.
    pub follower: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiblpModel {
    /// Variable names; `x_*` leader, `y_*`/`z_*` follower. All binary.
    pub vars: Vec<String>,
    /// Objective terms (the follower maximizes, the leader minimizes).
    pub objective: Vec<(usize, f64)>,
    /// All rows are `<=`.
    pub rows: Vec<MiblpRow>,
}

impl MiblpModel {
    pub fn from_wmcig(inst: &WmcigInstance) -> Result<Self> {
        if inst.coverage.is_empty() {
            return Err(Error::Domain("cannot export an instance without facilities".into()));
        }
        inst.validate()?;
        let n = inst.num_facilities();
        let m = inst.num_customers();
        let x = |i: usize| i;
        let y = |i: usize| n + i;
        let z = |j: usize| 2 * n + j;
        let mut vars: Vec<String> = (0..n).map(|i| format!("x_{i}")).collect();
        vars.extend((0..n).map(|i| format!("y_{i}")));
        vars.extend((0..m).map(|j| format!("z_{j}")));

        let objective = (0..m).map(|j| (z(j), inst.profits[j] as f64)).collect();
        let mut rows = vec![MiblpRow {
            name: "budget".into(),
            terms: (0..n).map(|i| (y(i), 1.0)).collect(),
            rhs: inst.budget as f64,
            follower: true,
        }];
        let mut covering = vec![Vec::new(); m];
        for (i, cov) in inst.coverage.iter().enumerate() {
            for &j in cov {
                covering[j].push(i);
            }
        }
        for (j, fac) in covering.iter().enumerate() {
            let mut terms: Vec<(usize, f64)> = fac.iter().map(|&i| (y(i), -1.0)).collect();
            terms.push((z(j), 1.0));
            rows.push(MiblpRow { name: format!("cover_{j}"), terms, rhs: 0.0, follower: true });
        }
        for i in 0..n {
            rows.push(MiblpRow {
                name: format!("link_{i}"),
                terms: vec![(x(i), 1.0), (y(i), 1.0)],
                rhs: 1.0,
                follower: true,
            });
        }
        rows.push(MiblpRow {
            name: "leader".into(),
            terms: (0..n).map(|i| (x(i), 1.0)).collect(),
            rhs: inst.interdiction as f64,
            follower: false,
        });
        Ok(Self { vars, objective, rows })
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// `OBJ` / `ROWS` / `BINARIES` listing. Coefficients use the shortest
    /// decimal that reads back to the same `f64`.
    pub fn to_lp_text(&self) -> String {
        let mut out = String::from("OBJ\n max:");
        write_terms(&mut out, &self.objective, &self.vars);
        out.push_str("\nROWS\n");
        for row in &self.rows {
            let _ = write!(out, " {}:", row.name);
            write_terms(&mut out, &row.terms, &self.vars);
            let _ = writeln!(out, " <= {}", row.rhs);
        }
        out.push_str("BINARIES\n");
        for v in &self.vars {
            let _ = writeln!(out, " {v}");
        }
        out.push_str("END\n");
        out
    }

    /// Follower variables and rows, one name per line.
    pub fn to_aux_text(&self) -> String {
        let follower_vars: Vec<&String> = self.vars.iter().filter(|v| !v.starts_with("x_")).collect();
        let follower_rows: Vec<&MiblpRow> = self.rows.iter().filter(|r| r.follower).collect();
        let mut out = String::new();
        let _ = writeln!(out, "@NUMVARS\n{}", follower_vars.len());
        let _ = writeln!(out, "@NUMCONSTRS\n{}", follower_rows.len());
        out.push_str("@VARSBEGIN\n");
        for v in follower_vars {
            let _ = writeln!(out, "{v}");
        }
        out.push_str("@VARSEND\n@CONSTRSBEGIN\n");
        for r in follower_rows {
            let _ = writeln!(out, "{}", r.name);
        }
        out.push_str("@CONSTRSEND\n@OBJSENSE\nMAX\n");
        out
    }

    /// Reads an `OBJ`/`ROWS`/`BINARIES` listing back. Rows named `leader`
    /// are marked as leader rows, all others as follower rows.
    pub fn parse_lp_text(text: &str) -> Result<Self> {
        #[derive(PartialEq)]
        enum Section {
            None,
            Obj,
            Rows,
            Binaries,
            End,
        }
        let mut section = Section::None;
        let mut vars: Vec<String> = Vec::new();
        let mut raw_obj: Vec<(String, f64)> = Vec::new();
        let mut raw_rows: Vec<(String, Vec<(String, f64)>, f64)> = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            match line {
                "OBJ" => section = Section::Obj,
                "ROWS" => section = Section::Rows,
                "BINARIES" => section = Section::Binaries,
                "END" => section = Section::End,
                _ => match section {
                    Section::Obj => {
                        let body = line
                            .strip_prefix("max:")
                            .ok_or_else(|| Error::Parse { line: line_no, msg: "objective must start with `max:`".into() })?;
                        raw_obj = parse_terms(body, line_no)?;
                    }
                    Section::Rows => {
                        let (name, body) = line
                            .split_once(':')
                            .ok_or_else(|| Error::Parse { line: line_no, msg: "row needs a name".into() })?;
                        let (lhs, rhs) = body
                            .split_once("<=")
                            .ok_or_else(|| Error::Parse { line: line_no, msg: "row needs `<=`".into() })?;
                        let rhs = rhs
                            .trim()
                            .parse::<f64>()
                            .map_err(|e| Error::Parse { line: line_no, msg: e.to_string() })?;
                        raw_rows.push((name.trim().to_string(), parse_terms(lhs, line_no)?, rhs));
                    }
                    Section::Binaries => vars.push(line.to_string()),
                    Section::None | Section::End => {
                        return Err(Error::Parse { line: line_no, msg: format!("unexpected line `{line}`") })
                    }
                },
            }
        }
        if section != Section::End {
            return Err(Error::Parse { line: 0, msg: "missing END".into() });
        }
        let id = |name: &str| {
            vars.iter()
                .position(|v| v == name)
                .ok_or_else(|| Error::Parse { line: 0, msg: format!("undeclared variable `{name}`") })
        };
        let resolve = |terms: Vec<(String, f64)>| -> Result<Vec<(usize, f64)>> {
            terms.into_iter().map(|(v, a)| Ok((id(&v)?, a))).collect()
        };
        let objective = resolve(raw_obj)?;
        let rows = raw_rows
            .into_iter()
            .map(|(name, terms, rhs)| {
                let follower = name != "leader";
                Ok(MiblpRow { name, terms: resolve(terms)?, rhs, follower })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { vars, objective, rows })
    }
}

fn write_terms(out: &mut String, terms: &[(usize, f64)], vars: &[String]) {
    for &(j, a) in terms {
        let sign = if a < 0.0 { '-' } else { '+' };
        let _ = write!(out, " {sign} {} {}", a.abs(), vars[j]);
    }
}

fn parse_terms(body: &str, line: usize) -> Result<Vec<(String, f64)>> {
    let toks: Vec<&str> = body.split_whitespace().collect();
    if toks.len() % 3 != 0 {
        return Err(Error::Parse { line, msg: "terms are `sign coef name` triples".into() });
    }
    toks.chunks(3)
        .map(|t| {
            let mag: f64 = t[1].parse().map_err(|_| Error::Parse { line, msg: format!("bad coefficient `{}`", t[1]) })?;
            let coef = match t[0] {
                "+" => mag,
                "-" => -mag,
                s => return Err(Error::Parse { line, msg: format!("bad sign `{s}`") }),
            };
            Ok((t[2].to_string(), coef))
        })
        .collect()
}
