//! Instance ingestion and export.
//!
//! The canonical interchange format is a plain edge list: one
//! `user<whitespace>perm` pair per line, `#` comments and blank lines
//! ignored. The RMPlib adapter normalizes benchmark matrices into the same
//! in-memory representation and round-trips through the edge-list exporter.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::AccessMatrix;

/// On-disk instance layouts understood by [`load_instance`].
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum InstanceFormat {
    EdgeList,
    Rmplib,
    /// Sniff: RMPlib matrix layouts first, edge list otherwise.
    Auto,
}

/// Loads a `user perm` edge-list file. Duplicate pairs are merged; vertex
/// order is first appearance.
pub fn load_edge_list(path: &Path) -> Result<AccessMatrix> {
    let text = fs::read_to_string(path)?;
    parse_edge_list(&text, &path.display().to_string())
}

pub fn parse_edge_list(text: &str, origin: &str) -> Result<AccessMatrix> {
    let mut b = AccessMatrix::builder();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let user = it.next();
        let perm = it.next();
        let extra = it.next();
        match (user, perm, extra) {
            (Some(u), Some(p), None) => b.add_edge(u, p),
            _ => {
                return Err(Error::Parse {
                    path: origin.to_owned(),
                    line: lineno + 1,
                    msg: format!("expected 'user perm', got '{line}'"),
                })
            }
        }
    }
    b.finish()
}

/// Writes the matrix as an edge list, one pair per line in edge-id order,
/// so that load -> export -> load is the identity.
pub fn export_edge_list<W: Write>(m: &AccessMatrix, w: &mut W) -> Result<()> {
    for e in m.edge_ids() {
        let (u, p) = m.endpoints(e);
        writeln!(w, "{} {}", m.user_name(u), m.perm_name(p))?;
    }
    Ok(())
}

/// Loads an RMPlib benchmark matrix.
///
/// The published instances store the user-permission assignment as a dense
/// 0/1 matrix, one user per row, optionally preceded by a header giving the
/// dimensions; some mirrors ship a sparse `user: perm perm ...` row layout
/// instead. Both are accepted here and normalized to first-appearance
/// ordering with synthesized `u{row}` / `p{col}` names where the file has no
/// identifiers of its own. All-zero rows and columns are dropped and
/// reported via [`AccessMatrix::dropped_vertices`].
pub fn load_rmplib(path: &Path) -> Result<AccessMatrix> {
    let text = fs::read_to_string(path)?;
    parse_rmplib(&text)
}

pub fn parse_rmplib(text: &str) -> Result<AccessMatrix> {
    let lines: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#') && !l.starts_with("//"))
        .collect();
    if lines.is_empty() {
        return Err(Error::Format(
            "RMPlib matrix: file has no content lines".into(),
        ));
    }

    if let Some(m) = try_parse_dense(&lines)? {
        return Ok(m);
    }
    if let Some(m) = try_parse_sparse_rows(&lines)? {
        return Ok(m);
    }
    Err(Error::Format(
        "RMPlib matrix: expected a dense 0/1 matrix (optionally preceded by \
         'rows cols' dimensions) or 'user: perm perm ...' rows"
            .into(),
    ))
}

/// Dense layout: every content line is a row of 0/1 cells, either separated
/// by whitespace or packed into one token. A leading `rows cols` header is
/// honoured when present.
fn try_parse_dense(lines: &[&str]) -> Result<Option<AccessMatrix>> {
    let mut rows: Vec<Vec<bool>> = Vec::new();
    let mut start = 0;
    let mut declared: Option<(usize, usize)> = None;

    // Header forms seen in the wild: "m n" on one line, or m and n on two.
    // A line that reads as a 0/1 row is data, never a header.
    fn two_ints(l: &str) -> Option<(usize, usize)> {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.as_slice() {
            [a, b] => a.parse().ok().zip(b.parse().ok()),
            _ => None,
        }
    }
    fn one_int(l: &str) -> Option<usize> {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.as_slice() {
            [a] => a.parse().ok(),
            _ => None,
        }
    }
    if !is_bit_row(lines[0]) {
        if let Some(dims) = two_ints(lines[0]) {
            declared = Some(dims);
            start = 1;
        } else if lines.len() >= 2 && !is_bit_row(lines[1]) {
            if let (Some(a), Some(b)) = (one_int(lines[0]), one_int(lines[1])) {
                declared = Some((a, b));
                start = 2;
            }
        }
    }

    let mut width = None;
    for line in &lines[start..] {
        let Some(cells) = parse_bit_row(line) else {
            return Ok(None);
        };
        match width {
            None => width = Some(cells.len()),
            Some(w) if w != cells.len() => {
                return Err(Error::Format(format!(
                    "RMPlib matrix: ragged rows ({} vs {} cells)",
                    w,
                    cells.len()
                )))
            }
            _ => {}
        }
        rows.push(cells);
    }
    if rows.is_empty() || width.unwrap_or(0) < 2 {
        return Ok(None);
    }
    if let Some((du, dp)) = declared {
        if du != rows.len() || dp != width.unwrap() {
            return Err(Error::Format(format!(
                "RMPlib matrix: header declares {du}x{dp} but body is {}x{}",
                rows.len(),
                width.unwrap()
            )));
        }
    }

    let width = width.unwrap();
    let mut b = AccessMatrix::builder();
    let mut seen_col = vec![false; width];
    for (i, row) in rows.iter().enumerate() {
        let mut any = false;
        for (j, &cell) in row.iter().enumerate() {
            if cell {
                b.add_edge(&format!("u{i}"), &format!("p{j}"));
                seen_col[j] = true;
                any = true;
            }
        }
        if !any {
            b.add_isolated_user(&format!("u{i}"));
        }
    }
    for (j, seen) in seen_col.iter().enumerate() {
        if !seen {
            b.add_isolated_perm(&format!("p{j}"));
        }
    }
    b.finish().map(Some)
}

fn is_bit_row(line: &str) -> bool {
    parse_bit_row(line).map_or(false, |r| r.len() >= 2)
}

fn parse_bit_row(line: &str) -> Option<Vec<bool>> {
    let toks: Vec<&str> = line.split([' ', '\t', ',', ';']).filter(|t| !t.is_empty()).collect();
    if toks.len() == 1 && toks[0].len() > 1 {
        // Packed row like "01101".
        return toks[0]
            .chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect();
    }
    toks.iter()
        .map(|t| match *t {
            "0" => Some(false),
            "1" => Some(true),
            _ => None,
        })
        .collect()
}

/// Sparse layout: `user: perm perm ...` per line.
fn try_parse_sparse_rows(lines: &[&str]) -> Result<Option<AccessMatrix>> {
    if !lines.iter().all(|l| l.contains(':')) {
        return Ok(None);
    }
    let mut b = AccessMatrix::builder();
    for line in lines {
        let (user, rest) = line.split_once(':').unwrap();
        let user = user.trim();
        if user.is_empty() {
            return Err(Error::Format(format!(
                "RMPlib matrix: row with empty user id: '{line}'"
            )));
        }
        let mut any = false;
        for perm in rest.split_whitespace() {
            b.add_edge(user, perm);
            any = true;
        }
        if !any {
            b.add_isolated_user(user);
        }
    }
    b.finish().map(Some)
}

/// Loads an instance in the requested format. `Auto` tries the RMPlib
/// layouts first and falls back to the edge list.
pub fn load_instance(path: &Path, format: InstanceFormat) -> Result<AccessMatrix> {
    match format {
        InstanceFormat::EdgeList => load_edge_list(path),
        InstanceFormat::Rmplib => load_rmplib(path),
        InstanceFormat::Auto => {
            let text = fs::read_to_string(path)?;
            match parse_rmplib(&text) {
                Ok(m) => Ok(m),
                Err(_) => parse_edge_list(&text, &path.display().to_string()),
            }
        }
    }
}
