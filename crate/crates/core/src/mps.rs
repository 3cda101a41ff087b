//! Reading and writing free-format MPS files.
//!
//! Supported sections: `NAME`, `OBJSENSE`, `ROWS`, `COLUMNS` (with `MARKER`
//! integrality blocks), `RHS`, `RANGES`, `BOUNDS`, `SOS` and `ENDATA`. Fixed
//! format files parse as long as names contain no blanks.
//!
//! Conventions:
//! * the first `N` row is the objective, later `N` rows are dropped;
//! * a maximization objective is negated so the model always minimizes;
//! * integer columns without any bound record default to `[0, 1]` and become
//!   binary, as does any column with a `BV` record;
//! * a `RANGES` entry turns a row into two one-sided rows, the second named
//!   `<row>.rlo` or `<row>.rhi`;
//! * an `RHS` entry on the objective row sets the objective constant to minus
//!   its value.
//!
//! `SOS` sections are kept as records on [`MpsDocument`]; they mean "at most
//! one non-zero", which is a different thing from the sum-to-one rows found by
//! [`crate::sos1::detect_sos1`].

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{MipModel, ModelError, RowId, Sense, VarId, VarKind, VariableSpec};

/// Bound magnitudes at or above this are read as infinite.
const MPS_INFINITY: f64 = 1e30;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MpsError {
    #[error("line {line}: unknown section `{name}`")]
    UnknownSection { line: usize, name: String },
    #[error("line {line}: record outside of any section")]
    NoSection { line: usize },
    #[error("line {line}: undefined row `{name}`")]
    UndefinedRow { line: usize, name: String },
    #[error("line {line}: undefined column `{name}`")]
    UndefinedColumn { line: usize, name: String },
    #[error("line {line}: duplicate entry for column `{column}` in row `{row}`")]
    DuplicateEntry {
        line: usize,
        column: String,
        row: String,
    },
    #[error("line {line}: duplicate row `{name}`")]
    DuplicateRow { line: usize, name: String },
    #[error("line {line}: malformed record: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: unsupported feature: {feature}")]
    Unsupported { line: usize, feature: String },
    #[error("no objective (N) row")]
    NoObjective,
    #[error("invalid model: {0}")]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SosKind {
    S1,
    S2,
}

/// One declared `SOS` set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SosRecord {
    pub kind: SosKind,
    pub name: String,
    pub priority: Option<f64>,
    pub members: Vec<(VarId, f64)>,
}

/// A parsed MPS file: the canonical model plus what does not fit in it.
#[derive(Debug, Clone, PartialEq)]
pub struct MpsDocument {
    pub model: MipModel,
    pub objective_name: String,
    /// `true` when the file declared a maximization objective.
    pub negated_objective: bool,
    pub sos: Vec<SosRecord>,
    pub warnings: Vec<String>,
}

pub fn parse_mps(text: &str) -> Result<MipModel, MpsError> {
    parse_document(text).map(|d| d.model)
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Name,
    ObjSense,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
    Sos,
}

struct RowDef {
    name: String,
    sense: Sense,
    rhs: f64,
    range: Option<f64>,
    terms: Vec<(VarId, f64)>,
}

struct ColDef {
    name: String,
    integer: bool,
    cost: f64,
    lb: f64,
    ub: f64,
    has_bound: bool,
    binary: bool,
}

pub fn parse_document(text: &str) -> Result<MpsDocument, MpsError> {
    let mut section: Option<Section> = None;
    let mut name = String::new();
    let mut maximize = false;
    let mut objective: Option<String> = None;
    let mut objective_constant = 0.0;
    let mut free_rows: Vec<String> = Vec::new();
    let mut rows: Vec<RowDef> = Vec::new();
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut cols: Vec<ColDef> = Vec::new();
    let mut col_index: HashMap<String, usize> = HashMap::new();
    // (column, row) pairs already seen; usize::MAX marks the objective row.
    let mut seen_entries: HashMap<(usize, usize), ()> = HashMap::new();
    let mut in_integer_block = false;
    let mut sos: Vec<SosRecord> = Vec::new();
    let mut warnings = Vec::new();
    let mut ended = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        if raw.starts_with('*') || raw.trim().is_empty() {
            continue;
        }
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        let header = !raw.starts_with(char::is_whitespace);
        if header {
            let keyword = tokens[0].to_ascii_uppercase();
            section = Some(match keyword.as_str() {
                "NAME" => {
                    name = tokens.get(1..).map(|t| t.join(" ")).unwrap_or_default();
                    Section::Name
                }
                "OBJSENSE" => {
                    if let Some(s) = tokens.get(1) {
                        maximize = parse_sense_word(s, line)?;
                    }
                    Section::ObjSense
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "RANGES" => Section::Ranges,
                "BOUNDS" => Section::Bounds,
                "SOS" => Section::Sos,
                "ENDATA" => {
                    ended = true;
                    break;
                }
                _ => {
                    return Err(MpsError::UnknownSection {
                        line,
                        name: tokens[0].to_string(),
                    })
                }
            });
            continue;
        }

        let Some(sec) = section else {
            return Err(MpsError::NoSection { line });
        };
        match sec {
            Section::Name => {}
            Section::ObjSense => maximize = parse_sense_word(tokens[0], line)?,
            Section::Rows => {
                if tokens.len() < 2 {
                    return Err(malformed(line, "ROWS record needs a type and a name"));
                }
                let rname = tokens[1].to_string();
                let sense = match tokens[0].to_ascii_uppercase().as_str() {
                    "N" => {
                        if objective.is_none() {
                            objective = Some(rname);
                        } else {
                            warnings.push(format!("line {line}: extra free row `{rname}` dropped"));
                            free_rows.push(rname);
                        }
                        continue;
                    }
                    "E" => Sense::Eq,
                    "L" => Sense::Le,
                    "G" => Sense::Ge,
                    other => return Err(malformed(line, &format!("unknown row type `{other}`"))),
                };
                if row_index.contains_key(&rname) || objective.as_deref() == Some(rname.as_str()) {
                    return Err(MpsError::DuplicateRow { line, name: rname });
                }
                row_index.insert(rname.clone(), rows.len());
                rows.push(RowDef {
                    name: rname,
                    sense,
                    rhs: 0.0,
                    range: None,
                    terms: Vec::new(),
                });
            }
            Section::Columns => {
                if tokens.len() >= 3 && tokens[1].trim_matches('\'').eq_ignore_ascii_case("MARKER")
                {
                    match tokens[2].trim_matches('\'').to_ascii_uppercase().as_str() {
                        "INTORG" => in_integer_block = true,
                        "INTEND" => in_integer_block = false,
                        other => {
                            return Err(malformed(line, &format!("unknown marker `{other}`")))
                        }
                    }
                    continue;
                }
                if tokens.len() != 3 && tokens.len() != 5 {
                    return Err(malformed(line, "COLUMNS record needs 3 or 5 fields"));
                }
                let cname = tokens[0];
                let c = match col_index.get(cname) {
                    Some(&c) => c,
                    None => {
                        col_index.insert(cname.to_string(), cols.len());
                        cols.push(ColDef {
                            name: cname.to_string(),
                            integer: in_integer_block,
                            cost: 0.0,
                            lb: 0.0,
                            ub: f64::INFINITY,
                            has_bound: false,
                            binary: false,
                        });
                        cols.len() - 1
                    }
                };
                for pair in tokens[1..].chunks(2) {
                    let rname = pair[0];
                    let value = number(pair[1], line)?;
                    let key = if objective.as_deref() == Some(rname) {
                        usize::MAX
                    } else if let Some(&r) = row_index.get(rname) {
                        r
                    } else if free_rows.iter().any(|f| f == rname) {
                        continue;
                    } else {
                        return Err(MpsError::UndefinedRow {
                            line,
                            name: rname.to_string(),
                        });
                    };
                    if seen_entries.insert((c, key), ()).is_some() {
                        return Err(MpsError::DuplicateEntry {
                            line,
                            column: cname.to_string(),
                            row: rname.to_string(),
                        });
                    }
                    if key == usize::MAX {
                        cols[c].cost = value;
                    } else if value != 0.0 {
                        rows[key].terms.push((VarId(c), value));
                    }
                }
            }
            Section::Rhs | Section::Ranges => {
                let fields = match tokens.len() {
                    2 | 4 => &tokens[..],
                    3 | 5 => &tokens[1..],
                    _ => return Err(malformed(line, "RHS/RANGES record needs 2 to 5 fields")),
                };
                for pair in fields.chunks(2) {
                    let rname = pair[0];
                    let value = number(pair[1], line)?;
                    if objective.as_deref() == Some(rname) {
                        if sec == Section::Rhs {
                            objective_constant = -value;
                        } else {
                            warnings.push(format!("line {line}: RANGES on objective ignored"));
                        }
                        continue;
                    }
                    if free_rows.iter().any(|f| f == rname) {
                        continue;
                    }
                    let Some(&r) = row_index.get(rname) else {
                        return Err(MpsError::UndefinedRow {
                            line,
                            name: rname.to_string(),
                        });
                    };
                    if sec == Section::Rhs {
                        rows[r].rhs = value;
                    } else {
                        rows[r].range = Some(value);
                    }
                }
            }
            Section::Bounds => {
                let kind = tokens[0].to_ascii_uppercase();
                let needs_value = matches!(kind.as_str(), "UP" | "LO" | "FX" | "LI" | "UI");
                let (cname, value) = match (needs_value, tokens.len()) {
                    (true, 4) => (tokens[2], Some(number(tokens[3], line)?)),
                    (true, 3) => (tokens[1], Some(number(tokens[2], line)?)),
                    (false, 3) | (false, 4) => (tokens[2], None),
                    (false, 2) => (tokens[1], None),
                    _ => return Err(malformed(line, "BOUNDS record has the wrong field count")),
                };
                let Some(&c) = col_index.get(cname) else {
                    return Err(MpsError::UndefinedColumn {
                        line,
                        name: cname.to_string(),
                    });
                };
                let col = &mut cols[c];
                col.has_bound = true;
                let v = value.unwrap_or(0.0);
                match kind.as_str() {
                    "UP" | "UI" => {
                        if kind == "UI" {
                            col.integer = true;
                        }
                        col.ub = to_bound(v);
                        if v < 0.0 && col.lb == 0.0 {
                            warnings.push(format!(
                                "line {line}: negative upper bound on `{cname}` with zero lower bound, lower bound set to -inf"
                            ));
                            col.lb = f64::NEG_INFINITY;
                        }
                    }
                    "LO" | "LI" => {
                        if kind == "LI" {
                            col.integer = true;
                        }
                        col.lb = to_bound(v);
                    }
                    "FX" => {
                        col.lb = v;
                        col.ub = v;
                    }
                    "FR" => {
                        col.lb = f64::NEG_INFINITY;
                        col.ub = f64::INFINITY;
                    }
                    "MI" => col.lb = f64::NEG_INFINITY,
                    "PL" => col.ub = f64::INFINITY,
                    "BV" => {
                        col.integer = true;
                        col.binary = true;
                        col.lb = 0.0;
                        col.ub = 1.0;
                    }
                    other => {
                        return Err(MpsError::Unsupported {
                            line,
                            feature: format!("bound type {other}"),
                        })
                    }
                }
            }
            Section::Sos => {
                let first = tokens[0].to_ascii_uppercase();
                if first == "S1" || first == "S2" {
                    let kind = if first == "S1" { SosKind::S1 } else { SosKind::S2 };
                    // ` S1 SOS name priority` or ` S1 name priority`
                    let rest: Vec<&str> = tokens[1..]
                        .iter()
                        .copied()
                        .skip_while(|t| t.eq_ignore_ascii_case("SOS"))
                        .collect();
                    let set_name = rest.first().map_or_else(
                        || format!("sos{}", sos.len() + 1),
                        |s| s.to_string(),
                    );
                    let priority = rest.get(1).map(|p| number(p, line)).transpose()?;
                    sos.push(SosRecord {
                        kind,
                        name: set_name,
                        priority,
                        members: Vec::new(),
                    });
                    continue;
                }
                let Some(set) = sos.last_mut() else {
                    return Err(malformed(line, "SOS member before any set header"));
                };
                let (cname, weight) = match tokens.len() {
                    1 => match tokens[0].split_once(':') {
                        Some((c, w)) => (c, number(w, line)?),
                        None => return Err(malformed(line, "SOS member needs a weight")),
                    },
                    2 => (tokens[0], number(tokens[1], line)?),
                    3 => (tokens[1], number(tokens[2], line)?),
                    _ => return Err(malformed(line, "SOS member has the wrong field count")),
                };
                let cname = cname.rsplit(':').next().unwrap_or(cname);
                let Some(&c) = col_index.get(cname) else {
                    return Err(MpsError::UndefinedColumn {
                        line,
                        name: cname.to_string(),
                    });
                };
                set.members.push((VarId(c), weight));
            }
        }
    }
    if !ended {
        let msg = "missing ENDATA".to_string();
        log::warn!("{msg}");
        warnings.push(msg);
    }
    let objective_name = objective.ok_or(MpsError::NoObjective)?;

    let sign = if maximize { -1.0 } else { 1.0 };
    let mut model = MipModel::new(name);
    for col in cols {
        let binary = col.binary || (col.integer && !col.has_bound);
        let (kind, lb, ub) = if binary {
            (VarKind::Binary, 0.0, 1.0)
        } else if col.integer {
            (VarKind::Integer, col.lb, col.ub)
        } else {
            (VarKind::Continuous, col.lb, col.ub)
        };
        model.add_variable(VariableSpec {
            name: col.name,
            kind,
            lb,
            ub,
            cost: sign * col.cost,
        })?;
    }
    model.objective_constant = sign * objective_constant;
    for row in rows {
        let Some(range) = row.range.filter(|r| *r != 0.0 || row.sense != Sense::Eq) else {
            model.add_constraint(row.name, row.terms, row.sense, row.rhs)?;
            continue;
        };
        let r = range.abs();
        let (first, second) = match row.sense {
            Sense::Le => ((Sense::Le, row.rhs), ("rlo", Sense::Ge, row.rhs - r)),
            Sense::Ge => ((Sense::Ge, row.rhs), ("rhi", Sense::Le, row.rhs + r)),
            Sense::Eq if range > 0.0 => ((Sense::Ge, row.rhs), ("rhi", Sense::Le, row.rhs + r)),
            Sense::Eq => ((Sense::Le, row.rhs), ("rlo", Sense::Ge, row.rhs - r)),
        };
        let extra = format!("{}.{}", row.name, second.0);
        model.add_constraint(row.name, row.terms.clone(), first.0, first.1)?;
        model.add_constraint(extra, row.terms, second.1, second.2)?;
    }

    Ok(MpsDocument {
        model,
        objective_name,
        negated_objective: maximize,
        sos,
        warnings,
    })
}

fn parse_sense_word(word: &str, line: usize) -> Result<bool, MpsError> {
    match word.to_ascii_uppercase().as_str() {
        "MAX" | "MAXIMIZE" => Ok(true),
        "MIN" | "MINIMIZE" => Ok(false),
        other => Err(malformed(line, &format!("unknown objective sense `{other}`"))),
    }
}

fn number(token: &str, line: usize) -> Result<f64, MpsError> {
    token
        .parse::<f64>()
        .map_err(|_| malformed(line, &format!("`{token}` is not a number")))
}

fn to_bound(v: f64) -> f64 {
    if v >= MPS_INFINITY {
        f64::INFINITY
    } else if v <= -MPS_INFINITY {
        f64::NEG_INFINITY
    } else {
        v
    }
}

fn malformed(line: usize, reason: &str) -> MpsError {
    MpsError::Malformed {
        line,
        reason: reason.to_string(),
    }
}

/// Shortest representation that parses back to the same `f64`.
fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Serialize `model` as free-format MPS. Empty column and row names are
/// replaced by `C0001...` and `R0001...`.
pub fn write_mps(model: &MipModel) -> String {
    let col_names: Vec<String> = model
        .variables()
        .iter()
        .enumerate()
        .map(|(j, v)| {
            if v.name.is_empty() {
                format!("C{:04}", j + 1)
            } else {
                v.name.clone()
            }
        })
        .collect();
    let row_names: Vec<String> = model
        .constraints()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            if r.name.is_empty() {
                format!("R{:04}", i + 1)
            } else {
                r.name.clone()
            }
        })
        .collect();
    let mut obj_name = "OBJ".to_string();
    while row_names.contains(&obj_name) {
        obj_name.push('_');
    }

    // Column-major view of the row entries.
    let mut by_col: Vec<Vec<(RowId, f64)>> = vec![Vec::new(); model.num_vars()];
    for row in model.constraints() {
        for &(v, a) in &row.terms {
            by_col[v.0].push((row.id, a));
        }
    }

    let mut out = String::new();
    let name = if model.name.is_empty() { "UNNAMED" } else { &model.name };
    let _ = writeln!(out, "NAME {name}");
    out.push_str("ROWS\n");
    let _ = writeln!(out, " N {obj_name}");
    for (row, rname) in model.constraints().iter().zip(&row_names) {
        let t = match row.sense {
            Sense::Le => "L",
            Sense::Ge => "G",
            Sense::Eq => "E",
        };
        let _ = writeln!(out, " {t} {rname}");
    }
    out.push_str("COLUMNS\n");
    let mut in_int = false;
    let mut marker = 0;
    for (var, cname) in model.variables().iter().zip(&col_names) {
        let int = var.kind.is_integral();
        if int != in_int {
            let tag = if int { "INTORG" } else { "INTEND" };
            let _ = writeln!(out, "    MARKER{marker:04} 'MARKER' '{tag}'");
            marker += 1;
            in_int = int;
        }
        let entries = &by_col[var.id.0];
        if var.cost != 0.0 || entries.is_empty() {
            let _ = writeln!(out, "    {cname} {obj_name} {}", num(var.cost));
        }
        for &(r, a) in entries {
            let _ = writeln!(out, "    {cname} {} {}", row_names[r.0], num(a));
        }
    }
    if in_int {
        let _ = writeln!(out, "    MARKER{marker:04} 'MARKER' 'INTEND'");
    }
    out.push_str("RHS\n");
    for (row, rname) in model.constraints().iter().zip(&row_names) {
        if row.rhs != 0.0 {
            let _ = writeln!(out, "    RHS {rname} {}", num(row.rhs));
        }
    }
    if model.objective_constant != 0.0 {
        let _ = writeln!(out, "    RHS {obj_name} {}", num(-model.objective_constant));
    }
    let mut bounds = String::new();
    for (var, cname) in model.variables().iter().zip(&col_names) {
        match var.kind {
            VarKind::Binary => {
                let _ = writeln!(bounds, " BV BND {cname}");
            }
            VarKind::Integer => {
                // Integer columns always carry a record so they are not read back as binary.
                write_lower(&mut bounds, cname, var.lb, true);
                write_upper(&mut bounds, cname, var.ub, true);
            }
            VarKind::Continuous => {
                if var.lb == var.ub {
                    let _ = writeln!(bounds, " FX BND {cname} {}", num(var.lb));
                } else if var.lb == f64::NEG_INFINITY && var.ub == f64::INFINITY {
                    let _ = writeln!(bounds, " FR BND {cname}");
                } else {
                    write_lower(&mut bounds, cname, var.lb, false);
                    write_upper(&mut bounds, cname, var.ub, false);
                }
            }
        }
    }
    if !bounds.is_empty() {
        out.push_str("BOUNDS\n");
        out.push_str(&bounds);
    }
    out.push_str("ENDATA\n");
    out
}

fn write_lower(out: &mut String, cname: &str, lb: f64, always: bool) {
    if lb == f64::NEG_INFINITY {
        let _ = writeln!(out, " MI BND {cname}");
    } else if lb != 0.0 || always {
        let _ = writeln!(out, " LO BND {cname} {}", num(lb));
    }
}

fn write_upper(out: &mut String, cname: &str, ub: f64, always: bool) {
    if ub == f64::INFINITY {
        if always {
            let _ = writeln!(out, " PL BND {cname}");
        }
    } else {
        let _ = writeln!(out, " UP BND {cname} {}", num(ub));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PARTITION: &str = "\
NAME part
ROWS
 N obj
 E c1
COLUMNS
    MARKER 'MARKER' 'INTORG'
    x obj 2 c1 1
    y obj 3 c1 1
    MARKER 'MARKER' 'INTEND'
RHS
    RHS c1 1
ENDATA
";

    #[test]
    fn minimal_partition_instance() {
        let m = parse_mps(PARTITION).unwrap();
        assert_eq!(m.num_vars(), 2);
        assert_eq!(m.num_binaries(), 2);
        assert_eq!(m.num_rows(), 1);
        let row = &m.constraints()[0];
        assert_eq!((row.sense, row.rhs), (Sense::Eq, 1.0));
        assert_eq!(m.costs(), vec![2.0, 3.0]);
    }

    #[test]
    fn bv_bound_makes_binary() {
        let text = "\
NAME bv
ROWS
 N obj
 L c
COLUMNS
    x obj 1 c 1
BOUNDS
 BV BND x
ENDATA
";
        let m = parse_mps(text).unwrap();
        assert_eq!(m.variables()[0].kind, VarKind::Binary);
    }

    #[test]
    fn errors() {
        let unknown = "NAME a\nROWS\n N obj\nFOO\nENDATA\n";
        assert!(matches!(parse_mps(unknown), Err(MpsError::UnknownSection { .. })));

        let bad_row = "NAME a\nROWS\n N obj\nCOLUMNS\n    x nope 1\nENDATA\n";
        assert!(matches!(parse_mps(bad_row), Err(MpsError::UndefinedRow { .. })));

        let bad_col = "NAME a\nROWS\n N obj\nCOLUMNS\n    x obj 1\nBOUNDS\n UP BND y 1\nENDATA\n";
        assert!(matches!(parse_mps(bad_col), Err(MpsError::UndefinedColumn { .. })));

        let dup = "NAME a\nROWS\n N obj\nCOLUMNS\n    x obj 1\n    x obj 2\nENDATA\n";
        assert!(matches!(parse_mps(dup), Err(MpsError::DuplicateEntry { .. })));

        let sc = "NAME a\nROWS\n N obj\nCOLUMNS\n    x obj 1\nBOUNDS\n SC BND x 4\nENDATA\n";
        assert!(matches!(parse_mps(sc), Err(MpsError::Unsupported { .. })));
    }

    #[test]
    fn missing_endata_is_a_warning() {
        let doc = parse_document("NAME a\nROWS\n N obj\nCOLUMNS\n    x obj 1\n").unwrap();
        assert_eq!(doc.model.num_vars(), 1);
        assert_eq!(doc.warnings, vec!["missing ENDATA".to_string()]);
    }

    #[test]
    fn maximize_is_negated() {
        let text = "NAME a\nOBJSENSE\n    MAX\nROWS\n N obj\nCOLUMNS\n    x obj 4\nRHS\n    RHS obj 2\nENDATA\n";
        let doc = parse_document(text).unwrap();
        assert!(doc.negated_objective);
        assert_eq!(doc.model.costs(), vec![-4.0]);
        assert_eq!(doc.model.objective_constant, 2.0);
    }

    #[test]
    fn empty_model_skeleton() {
        let text = write_mps(&MipModel::new("empty"));
        assert_eq!(text, "NAME empty\nROWS\n N OBJ\nCOLUMNS\nRHS\nENDATA\n");
        assert_eq!(parse_mps(&text).unwrap(), MipModel::new("empty"));
    }

    #[test]
    fn free_lower_bound_writes_mi() {
        let mut m = MipModel::new("mi");
        m.add_variable(VariableSpec::continuous("z", f64::NEG_INFINITY, 4.0))
            .unwrap();
        let text = write_mps(&m);
        assert!(text.contains(" MI BND z\n"));
        assert!(text.contains(" UP BND z 4.0\n"));
        assert_eq!(parse_mps(&text).unwrap(), m);
    }

    #[test]
    fn unnamed_columns_get_generated_names() {
        let mut m = MipModel::new("anon");
        m.add_variable(VariableSpec::binary("")).unwrap();
        let text = write_mps(&m);
        assert!(text.contains("C0001"));
    }
}
