//! CPLEX LP text exchange for level models and "name value" solution files.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::exact::Status;
use crate::graph::VertexSet;

use super::backend::BackendResult;
use super::{var_name, Assignment, IlpModel, ModelKind, VertexRow};

const TERMS_PER_LINE: usize = 8;
const NAMES_PER_LINE: usize = 10;
const BINARY_TOL: f64 = 1e-6;

fn kind_name(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::Full => "full",
        ModelKind::Reduced => "reduced",
    }
}

/// Writes `terms` as a signed sum, wrapping long rows onto indented
/// continuation lines.
fn write_sum(out: &mut String, terms: &[(i64, String)], always_coef: bool) {
    for (j, (c, name)) in terms.iter().enumerate() {
        if j > 0 && j % TERMS_PER_LINE == 0 {
            out.push_str("\n  ");
        }
        let sign = if *c < 0 { "-" } else { "+" };
        if j > 0 || *c < 0 {
            let _ = write!(out, " {sign} ");
        } else {
            out.push(' ');
        }
        let mag = c.unsigned_abs();
        if always_coef || mag != 1 {
            let _ = write!(out, "{mag} ");
        }
        out.push_str(name);
    }
}

/// Renders a model in CPLEX LP format. Rows are `k_sum`, then per vertex
/// `assign_v` followed by its `link_v_i`; vertices and levels ascend.
pub fn export_lp(model: &IlpModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ level model");
    let _ = writeln!(out, "\\ kind: {}", kind_name(model.kind));
    let _ = writeln!(out, "\\ k: {}", model.k);
    out.push_str("Minimize\n obj:");
    let obj: Vec<(i64, String)> = model
        .rows
        .iter()
        .flat_map(|r| r.levels().map(move |i| (r.coefficient(i) as i64, var_name(r.vertex, i))))
        .collect();
    write_sum(&mut out, &obj, true);
    out.push_str("\nSubject To\n k_sum:");
    let centers: Vec<(i64, String)> = model
        .rows
        .iter()
        .filter(|r| r.center)
        .map(|r| (1, var_name(r.vertex, 0)))
        .collect();
    write_sum(&mut out, &centers, false);
    let _ = writeln!(out, " = {}", model.k);
    for r in &model.rows {
        let _ = write!(out, " assign_{}:", r.vertex);
        let terms: Vec<(i64, String)> = r.levels().map(|i| (1, var_name(r.vertex, i))).collect();
        write_sum(&mut out, &terms, false);
        out.push_str(" = 1\n");
        for i in 1..r.cap {
            let _ = write!(out, " link_{}_{}:", r.vertex, i);
            let mut terms = vec![(1, var_name(r.vertex, i))];
            terms.extend(r.supporters[i as usize].iter().map(|&w| (-1, var_name(w, 0))));
            write_sum(&mut out, &terms, false);
            out.push_str(" <= 0\n");
        }
    }
    out.push_str("Binaries\n");
    let names: Vec<String> = obj.into_iter().map(|(_, n)| n).collect();
    for chunk in names.chunks(NAMES_PER_LINE) {
        let _ = writeln!(out, " {}", chunk.join(" "));
    }
    out.push_str("End\n");
    out
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Name(String),
    Num(f64),
    Colon,
    Plus,
    Minus,
    Le,
    Ge,
    Eq,
}

fn lex(line: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\r' => i += 1,
            ':' => {
                out.push(Token::Colon);
                i += 1;
            }
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' => {
                out.push(Token::Minus);
                i += 1;
            }
            '<' | '>' | '=' => {
                let mut j = i + 1;
                while j < chars.len() && matches!(chars[j], '<' | '>' | '=') {
                    j += 1;
                }
                let op: String = chars[i..j].iter().collect();
                out.push(match op.as_str() {
                    "<" | "<=" | "=<" => Token::Le,
                    ">" | ">=" | "=>" => Token::Ge,
                    "=" => Token::Eq,
                    _ => return Err(Error::LpFormat(format!("bad operator {op}"))),
                });
                i = j;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let mut j = i;
                while j < chars.len()
                    && (chars[j].is_ascii_digit()
                        || matches!(chars[j], '.' | 'e' | 'E')
                        || (matches!(chars[j], '+' | '-') && matches!(chars[j - 1], 'e' | 'E')))
                {
                    j += 1;
                }
                let text: String = chars[i..j].iter().collect();
                let v = text
                    .parse()
                    .map_err(|_| Error::LpFormat(format!("bad number {text}")))?;
                out.push(Token::Num(v));
                i = j;
            }
            _ => {
                let mut j = i;
                while j < chars.len() && !matches!(chars[j], ' ' | '\t' | '\r' | ':' | '+' | '-' | '<' | '>' | '=') {
                    j += 1;
                }
                out.push(Token::Name(chars[i..j].iter().collect()));
                i = j;
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug)]
struct Row {
    name: String,
    terms: Vec<(f64, String)>,
    sense: Sense,
    rhs: f64,
}

/// Reads `[sign] [coef] name` terms starting at `*pos` until a token that
/// cannot continue the sum.
fn read_terms(toks: &[Token], pos: &mut usize) -> Result<Vec<(f64, String)>> {
    let mut terms = Vec::new();
    loop {
        let mut sign = 1.0;
        let mut saw_sign = false;
        while let Some(t @ (Token::Plus | Token::Minus)) = toks.get(*pos) {
            if *t == Token::Minus {
                sign = -sign;
            }
            saw_sign = true;
            *pos += 1;
        }
        let coef = match toks.get(*pos) {
            Some(Token::Num(v)) => {
                *pos += 1;
                Some(*v)
            }
            _ => None,
        };
        match toks.get(*pos) {
            Some(Token::Name(n)) if !matches!(toks.get(*pos + 1), Some(Token::Colon)) => {
                *pos += 1;
                terms.push((sign * coef.unwrap_or(1.0), n.clone()));
            }
            _ => {
                if let Some(c) = coef {
                    if matches!(toks.get(*pos), Some(Token::Le | Token::Ge | Token::Eq)) || toks.get(*pos).is_none() {
                        // A constant on the left-hand side is not supported.
                        return Err(Error::LpFormat(format!("constant term {}", sign * c)));
                    }
                }
                if saw_sign {
                    return Err(Error::LpFormat("dangling sign".into()));
                }
                return Ok(terms);
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Header,
    Objective,
    Constraints,
    Binaries,
    End,
}

fn section_of(line: &str) -> Option<Section> {
    match line.to_ascii_lowercase().as_str() {
        "minimize" | "minimise" | "min" => Some(Section::Objective),
        "subject to" | "such that" | "st" | "s.t." => Some(Section::Constraints),
        "binaries" | "binary" | "bin" => Some(Section::Binaries),
        "end" => Some(Section::End),
        _ => None,
    }
}

struct LpText {
    kind: Option<ModelKind>,
    objective: Vec<(f64, String)>,
    rows: Vec<Row>,
    binaries: BTreeSet<String>,
}

fn read_lp(text: &str) -> Result<LpText> {
    let mut section = Section::Header;
    let mut kind = None;
    let mut obj_toks = Vec::new();
    let mut con_toks = Vec::new();
    let mut binaries = BTreeSet::new();
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('\\') {
            if let Some(k) = comment.trim().strip_prefix("kind:") {
                kind = match k.trim() {
                    "full" => Some(ModelKind::Full),
                    "reduced" => Some(ModelKind::Reduced),
                    other => return Err(Error::LpFormat(format!("unknown model kind {other}"))),
                };
            }
            continue;
        }
        if let Some(s) = section_of(line) {
            if s == Section::Objective && section != Section::Header {
                return Err(Error::LpFormat("objective section out of order".into()));
            }
            section = s;
            continue;
        }
        let lower = line.to_ascii_lowercase();
        if lower.starts_with("maximize") || lower.starts_with("maximise") || lower == "max" {
            return Err(Error::LpFormat("only minimization models are supported".into()));
        }
        match section {
            Section::Header => return Err(Error::LpFormat(format!("unexpected text before objective: {line}"))),
            Section::Objective => obj_toks.extend(lex(line)?),
            Section::Constraints => con_toks.extend(lex(line)?),
            Section::Binaries => binaries.extend(line.split_whitespace().map(str::to_string)),
            Section::End => return Err(Error::LpFormat("text after End".into())),
        }
    }
    if section != Section::End {
        return Err(Error::LpFormat("missing End".into()));
    }

    let mut pos = 0;
    if let (Some(Token::Name(_)), Some(Token::Colon)) = (obj_toks.first(), obj_toks.get(1)) {
        pos = 2;
    }
    let objective = read_terms(&obj_toks, &mut pos)?;
    if pos != obj_toks.len() {
        return Err(Error::LpFormat("trailing tokens in objective".into()));
    }

    let mut rows = Vec::new();
    let mut pos = 0;
    while pos < con_toks.len() {
        let name = match (con_toks.get(pos), con_toks.get(pos + 1)) {
            (Some(Token::Name(n)), Some(Token::Colon)) => n.clone(),
            _ => return Err(Error::LpFormat("constraint without a name".into())),
        };
        pos += 2;
        let terms = read_terms(&con_toks, &mut pos)?;
        let sense = match con_toks.get(pos) {
            Some(Token::Le) => Sense::Le,
            Some(Token::Ge) => Sense::Ge,
            Some(Token::Eq) => Sense::Eq,
            _ => return Err(Error::LpFormat(format!("row {name} has no comparison"))),
        };
        pos += 1;
        let mut sign = 1.0;
        if let Some(Token::Minus) = con_toks.get(pos) {
            sign = -1.0;
            pos += 1;
        }
        let rhs = match con_toks.get(pos) {
            Some(Token::Num(v)) => sign * v,
            _ => return Err(Error::LpFormat(format!("row {name} has no right-hand side"))),
        };
        pos += 1;
        rows.push(Row { name, terms, sense, rhs });
    }
    Ok(LpText {
        kind,
        objective,
        rows,
        binaries,
    })
}

fn parse_var(name: &str) -> Option<(usize, u32)> {
    let rest = name.strip_prefix("x_")?;
    let (v, i) = rest.split_once('_')?;
    Some((v.parse().ok()?, i.parse().ok()?))
}

fn as_int(x: f64, what: &str) -> Result<i64> {
    if x.fract() != 0.0 {
        return Err(Error::LpFormat(format!("{what} must be an integer, got {x}")));
    }
    Ok(x as i64)
}

fn var_of(name: &str) -> Result<(usize, u32)> {
    parse_var(name).ok_or_else(|| Error::UnknownVariable(name.to_string()))
}

/// Parses LP text produced by [`export_lp`] (or an equivalent layout) back
/// into a level model.
pub fn parse_lp(text: &str) -> Result<IlpModel> {
    let lp = read_lp(text)?;
    let mut coef: BTreeMap<(usize, u32), u64> = BTreeMap::new();
    for (c, name) in &lp.objective {
        let c = as_int(*c, "objective coefficient")?;
        if c < 0 {
            return Err(Error::LpFormat(format!("negative cost on {name}")));
        }
        if coef.insert(var_of(name)?, c as u64).is_some() {
            return Err(Error::LpFormat(format!("{name} repeated in objective")));
        }
    }
    for name in &lp.binaries {
        if !coef.contains_key(&var_of(name)?) {
            return Err(Error::LpFormat(format!("{name} is not in the objective")));
        }
    }
    if lp.binaries.len() != coef.len() {
        return Err(Error::LpFormat("every variable must be binary".into()));
    }

    let mut k = None;
    let mut centers = Vec::new();
    let mut assign: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    let mut links: BTreeMap<(usize, u32), Vec<usize>> = BTreeMap::new();
    for row in &lp.rows {
        let bad = || Error::LpFormat(format!("row {} does not fit the level model", row.name));
        let vars: Vec<(f64, (usize, u32))> = row
            .terms
            .iter()
            .map(|(c, n)| var_of(n).map(|v| (*c, v)))
            .collect::<Result<_>>()?;
        if let Some(v) = vars.iter().find(|(_, v)| !coef.contains_key(v)) {
            return Err(Error::UnknownVariable(var_name(v.1 .0, v.1 .1)));
        }
        if row.name == "k_sum" {
            if row.sense != Sense::Eq || vars.iter().any(|&(c, (_, i))| c != 1.0 || i != 0) {
                return Err(bad());
            }
            let rhs = as_int(row.rhs, "k")?;
            if rhs < 1 {
                return Err(bad());
            }
            k = Some(rhs as usize);
            centers = vars.iter().map(|&(_, (v, _))| v).collect();
        } else if let Some(v) = row.name.strip_prefix("assign_") {
            let v: usize = v.parse().map_err(|_| bad())?;
            if row.sense != Sense::Eq || row.rhs != 1.0 || vars.iter().any(|&(c, (w, _))| c != 1.0 || w != v) {
                return Err(bad());
            }
            let levels = vars.iter().map(|&(_, (_, i))| i).collect();
            if assign.insert(v, levels).is_some() {
                return Err(Error::LpFormat(format!("duplicate row {}", row.name)));
            }
        } else if let Some((v, i)) = row.name.strip_prefix("link_").and_then(|r| r.split_once('_')) {
            let (v, i): (usize, u32) = (v.parse().map_err(|_| bad())?, i.parse().map_err(|_| bad())?);
            if row.sense != Sense::Le || row.rhs != 0.0 || vars.first() != Some(&(1.0, (v, i))) {
                return Err(bad());
            }
            let mut sup = Vec::new();
            for &(c, (w, l)) in &vars[1..] {
                if c != -1.0 || l != 0 {
                    return Err(bad());
                }
                sup.push(w);
            }
            sup.sort_unstable();
            if links.insert((v, i), sup).is_some() {
                return Err(Error::LpFormat(format!("duplicate row {}", row.name)));
            }
        } else {
            return Err(Error::LpFormat(format!("unknown row {}", row.name)));
        }
    }
    let k = k.ok_or_else(|| Error::LpFormat("missing k_sum row".into()))?;
    let centers = VertexSet::new(centers);

    let mut rows = Vec::new();
    let mut any_alpha = false;
    for (&v, levels) in &assign {
        let mut levels = levels.clone();
        levels.sort_unstable();
        let center = centers.contains(v);
        let lo = if center { 0 } else { 1 };
        let cap = *levels.last().ok_or_else(|| Error::LpFormat(format!("row assign_{v} is empty")))?;
        if levels != (lo..=cap).collect::<Vec<_>>() {
            return Err(Error::LpFormat(format!("levels of vertex {v} are not contiguous")));
        }
        // coefficient(i) = alpha * (i + 1) + i
        let c_lo = coef[&(v, lo)];
        let alpha = (c_lo - lo as u64) / (lo as u64 + 1);
        let mut supporters = vec![Vec::new(); cap.max(1) as usize];
        for i in 1..cap {
            supporters[i as usize] = links
                .remove(&(v, i))
                .ok_or_else(|| Error::LpFormat(format!("missing row link_{v}_{i}")))?;
        }
        let row = VertexRow {
            vertex: v,
            alpha: alpha as u32,
            cap,
            center,
            supporters,
        };
        for i in row.levels() {
            if coef[&(v, i)] != row.coefficient(i) {
                return Err(Error::LpFormat(format!("cost of {} does not follow the level form", var_name(v, i))));
            }
        }
        any_alpha |= alpha > 0;
        rows.push(row);
    }
    if let Some(&(v, i)) = links.keys().next() {
        return Err(Error::LpFormat(format!("row link_{v}_{i} has no matching level")));
    }
    let modeled: usize = rows.iter().map(|r| (r.cap - r.min_level() + 1) as usize).sum();
    if modeled != coef.len() {
        return Err(Error::LpFormat("a variable has no assign row".into()));
    }
    for r in &rows {
        for w in r.supporters.iter().flatten() {
            if !centers.contains(*w) {
                return Err(Error::LpFormat(format!("link row of {} uses non-center {w}", r.vertex)));
            }
        }
    }
    let kind = lp.kind.unwrap_or(if any_alpha { ModelKind::Reduced } else { ModelKind::Full });
    Ok(IlpModel { kind, k, centers, rows })
}

/// Reads a solver's "name value" listing, rounds to 0/1, rechecks every
/// constraint and recomputes the objective. Blank lines and lines starting
/// with `#` or `\` are skipped.
pub fn import_solution(text: &str, model: &IlpModel) -> Result<BackendResult> {
    let mut ones = BTreeSet::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('\\') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(name), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Backend(format!("bad solution line: {line}")));
        };
        let value: f64 = value
            .parse()
            .map_err(|_| Error::Backend(format!("bad value on line: {line}")))?;
        let var = parse_var(name)
            .filter(|&(v, i)| model.has_variable(v, i))
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        if value.abs() <= BINARY_TOL {
            continue;
        }
        if (value - 1.0).abs() <= BINARY_TOL {
            ones.insert(var);
        } else {
            return Err(Error::NonBinary {
                name: name.to_string(),
                value,
            });
        }
    }
    let assignment = Assignment { ones };
    let objective = model.evaluate(&assignment)?;
    Ok(BackendResult {
        objective,
        assignment,
        status: Status::Optimal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{eccentricities, Graph};
    use crate::ilp::{build_full_model, build_reduced_model, builtin_backend_solve};
    use crate::reductions::reduce;
    use crate::generators::gen_random_connected;

    fn star_reduced() -> IlpModel {
        let g = Graph::from_edges(6, (1..6).map(|i| (0, i))).unwrap();
        build_reduced_model(&g, 1, &[1, 2, 2, 2, 2, 2], &reduce(&g, 1)).unwrap()
    }

    #[test]
    fn star_export_text() {
        let text = export_lp(&star_reduced());
        assert_eq!(
            text,
            "\\ level model\n\\ kind: reduced\n\\ k: 1\nMinimize\n obj: 5 x_0_0 + 11 x_0_1\n\
             Subject To\n k_sum: x_0_0 = 1\n assign_0: x_0_0 + x_0_1 = 1\nBinaries\n x_0_0 x_0_1\nEnd\n"
        );
    }

    #[test]
    fn import_examples() {
        let m = star_reduced();
        let res = import_solution("x_0_0 1.0\n", &m).unwrap();
        assert_eq!(res.objective, 5);
        let res = import_solution("# objective 5\nx_0_0 0.9999999\nx_0_1 1e-9\n", &m).unwrap();
        assert_eq!(res.objective, 5);
        assert!(matches!(import_solution("x_0_0 0.5\n", &m), Err(Error::NonBinary { .. })));
        assert!(matches!(import_solution("x_0_1 1\n", &m), Err(Error::Infeasible(r)) if r == "k_sum"));
        assert!(matches!(import_solution("x_9_0 1\n", &m), Err(Error::UnknownVariable(_))));
        assert!(matches!(import_solution("x_0_0\n", &m), Err(Error::Backend(_))));
    }

    #[test]
    fn round_trip_reproduces_model() {
        for seed in 0..30 {
            let g = gen_random_connected(10 + seed as usize % 12, 0.2, 900 + seed);
            let (ecc, _) = eccentricities(&g);
            let k = 2 + seed as usize % 3;
            let red = reduce(&g, k);
            let caps: Vec<u32> = ecc.iter().map(|&e| e.min(2 + seed as u32 % 3)).collect();
            for m in [
                build_reduced_model(&g, k, &caps, &red).unwrap(),
                build_full_model(&g, k, &caps, &red.dominated).unwrap(),
            ] {
                let text = export_lp(&m);
                let back = parse_lp(&text).unwrap();
                assert_eq!(back, m);
                assert_eq!(export_lp(&back), text);
                let a = builtin_backend_solve(&m, None).unwrap();
                let b = builtin_backend_solve(&back, None).unwrap();
                assert_eq!(a.objective, b.objective);
            }
        }
    }

    #[test]
    fn parser_accepts_loose_layout() {
        let text = "Minimize\nobj: 5 x_0_0\n + 11 x_0_1\nSubject To\nk_sum: x_0_0 = 1\n\
                    assign_0: x_0_0\n + x_0_1 = 1\nBinary\nx_0_0\nx_0_1\nEnd\n";
        let m = parse_lp(text).unwrap();
        assert_eq!(m.rows[0].alpha, 5);
        assert_eq!(m.kind, ModelKind::Reduced);
    }

    #[test]
    fn parser_rejects_malformed_text() {
        let ok = export_lp(&star_reduced());
        assert!(parse_lp(&ok.replace("End\n", "")).is_err());
        assert!(parse_lp(&ok.replace("11 x_0_1", "12 x_0_1")).is_err());
        assert!(parse_lp(&ok.replace("k_sum:", "")).is_err());
        assert!(parse_lp(&ok.replace("= 1\n assign", "<= 1\n assign")).is_err());
        assert!(parse_lp(&ok.replace("Minimize", "Maximize")).is_err());
        assert!(parse_lp(&ok.replace(" x_0_0 x_0_1\n", " x_0_0\n")).is_err());
    }

    #[test]
    fn long_rows_wrap() {
        let g = Graph::from_edges(20, (1..20).map(|i| (0, i))).unwrap();
        let (ecc, _) = eccentricities(&g);
        let m = build_full_model(&g, 2, &ecc, &VertexSet::empty()).unwrap();
        let text = export_lp(&m);
        assert!(text.lines().all(|l| l.len() < 120));
        assert_eq!(parse_lp(&text).unwrap(), m);
    }
}
