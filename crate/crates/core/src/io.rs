//! Plain-text instance formats.
//!
//! All instance files are line-based. Blank lines and lines starting with
//! `#` are ignored everywhere. Parse errors carry the 1-based line number
//! of the offending line.
//!
//! The building block shared by every format is the group block:
//!
//! ```text
//! group <n>
//! <n rows of n space-separated indices>   # row a lists a·b for b = 0..n
//! ```
//!
//! The composite formats (gamma-group, homogeneous-space, groupoid,
//! relation, ambient-action, tower) are parsed by [`parse_instance`] and
//! documented in the README with worked examples.

use crate::group::FiniteGroup;
use crate::{Error, Result};

/// Line-oriented reader that skips blanks and `#` comments and remembers
/// line numbers for diagnostics.
pub struct Cursor<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        Cursor { lines, pos: 0 }
    }

    /// Line number to attach to an error at the current position.
    pub fn here(&self) -> usize {
        self.lines
            .get(self.pos)
            .or_else(|| self.lines.last())
            .map(|&(n, _)| n)
            .unwrap_or(0)
    }

    pub fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.here(), msg: msg.into() }
    }

    pub fn peek(&self) -> Option<&'a str> {
        self.lines.get(self.pos).map(|&(_, l)| l)
    }

    pub fn next_line(&mut self, what: &str) -> Result<(usize, &'a str)> {
        match self.lines.get(self.pos) {
            Some(&(n, l)) => {
                self.pos += 1;
                Ok((n, l))
            }
            None => Err(Error::Parse {
                line: self.lines.last().map(|&(n, _)| n + 1).unwrap_or(1),
                msg: format!("unexpected end of input, expected {what}"),
            }),
        }
    }

    /// Consumes a line that must start with `keyword`, returning the rest.
    pub fn expect_keyword(&mut self, keyword: &str) -> Result<&'a str> {
        let (n, l) = self.next_line(&format!("`{keyword}`"))?;
        match l.strip_prefix(keyword) {
            Some(rest) if rest.is_empty() || rest.starts_with(char::is_whitespace) => {
                Ok(rest.trim())
            }
            _ => Err(Error::Parse {
                line: n,
                msg: format!("expected `{keyword}`, found `{l}`"),
            }),
        }
    }

    /// True if the next line starts with `keyword`; consumes it if so.
    pub fn eat_keyword(&mut self, keyword: &str) -> Option<&'a str> {
        if let Some(l) = self.peek() {
            if let Some(rest) = l.strip_prefix(keyword) {
                if rest.is_empty() || rest.starts_with(char::is_whitespace) {
                    self.pos += 1;
                    return Some(rest.trim());
                }
            }
        }
        None
    }

    pub fn expect_end(&self) -> Result<()> {
        match self.lines.get(self.pos) {
            None => Ok(()),
            Some(&(n, l)) => Err(Error::Parse {
                line: n,
                msg: format!("trailing content: `{l}`"),
            }),
        }
    }
}

/// Parses one whitespace-separated row of numbers, checking the length.
pub fn parse_row(line_no: usize, line: &str, expect: usize) -> Result<Vec<usize>> {
    let row: std::result::Result<Vec<usize>, _> =
        line.split_whitespace().map(str::parse).collect();
    let row = row.map_err(|e| Error::Parse {
        line: line_no,
        msg: format!("bad number: {e}"),
    })?;
    if row.len() != expect {
        return Err(Error::Parse {
            line: line_no,
            msg: format!("expected {expect} entries, found {}", row.len()),
        });
    }
    Ok(row)
}

pub fn parse_count(line_no: usize, text: &str, what: &str) -> Result<usize> {
    text.trim().parse().map_err(|e| Error::Parse {
        line: line_no,
        msg: format!("bad {what}: {e}"),
    })
}

/// Parses a `group <n>` block with its multiplication table.
pub fn parse_group_block(cur: &mut Cursor<'_>, label: String) -> Result<FiniteGroup> {
    let rest = cur.expect_keyword("group")?;
    let n = parse_count(cur.here().saturating_sub(0), rest, "group order")?;
    if n == 0 {
        return Err(cur.err("group order must be positive"));
    }
    let mut table = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, l) = cur.next_line("multiplication table row")?;
        table.push(parse_row(ln, l, n)?);
    }
    FiniteGroup::from_table(label, &table)
}

/// Parses a rectangular table: `rows` lines of `cols` entries, each `< bound`.
pub fn parse_table(
    cur: &mut Cursor<'_>,
    rows: usize,
    cols: usize,
    bound: usize,
    what: &str,
) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let (ln, l) = cur.next_line(&format!("{what} row"))?;
        let row = parse_row(ln, l, cols)?;
        for &v in &row {
            if v >= bound {
                return Err(Error::Parse {
                    line: ln,
                    msg: format!("{what} entry {v} out of range (max {})", bound - 1),
                });
            }
        }
        out.extend(row);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cursor_skips_comments_and_blanks() {
        let mut cur = Cursor::new("# heading\n\n  group 2  \n0 1\n1 0\n# trailing\n");
        let g = parse_group_block(&mut cur, "C2".into()).unwrap();
        assert_eq!(g.order(), 2);
        cur.expect_end().unwrap();
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let mut cur = Cursor::new("group 2\n0 1\n1 x\n");
        match parse_group_block(&mut cur, "bad".into()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn wrong_row_length_is_rejected() {
        let mut cur = Cursor::new("group 2\n0 1 1\n1 0\n");
        assert!(matches!(
            parse_group_block(&mut cur, "bad".into()),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
