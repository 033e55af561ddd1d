//! Hand-rolled scanner/parser for the clause grammar:
//!
//! ```text
//! program := (comment | clause)*
//! comment := "%" to end-of-line
//! clause  := atom ( "<-" atom ("," atom)* )? "."
//! atom    := [A-Za-z_][A-Za-z0-9_]*
//! ```
//!
//! Whitespace is insignificant. Atoms are indexed in first-appearance order.

use std::collections::HashMap;
use std::fmt;

use super::{Atom, Clause, LogicProgram};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// A character outside the grammar.
    UnexpectedChar(char),
    /// Input ended in the middle of a clause.
    UnexpectedEnd,
    /// An atom was required (after `<-` or `,`).
    ExpectedAtom,
    /// Missing `.` terminator.
    ExpectedDot,
    /// A clause beginning with `<-`: not definite.
    HeadlessClause,
    /// The same atom twice in one clause; forbidden so the compiled weights
    /// stay zero-diagonal.
    DuplicateAtom(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: ", self.line, self.column)?;
        match &self.kind {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character `{c}`"),
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input inside a clause"),
            ParseErrorKind::ExpectedAtom => write!(f, "expected an atom"),
            ParseErrorKind::ExpectedDot => write!(f, "expected `.` to end the clause"),
            ParseErrorKind::HeadlessClause => {
                write!(f, "clause has no head; only definite clauses are accepted")
            }
            ParseErrorKind::DuplicateAtom(name) => {
                write!(f, "atom `{name}` occurs twice in one clause")
            }
        }
    }
}

impl std::error::Error for ParseError {}

struct Scanner<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Scanner<'a> {
    fn new(text: &'a str) -> Self {
        Scanner { chars: text.chars().peekable(), line: 1, column: 1 }
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { line: self.line, column: self.column, kind }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    /// Skips whitespace and `%` comments; leaves the scanner at the next
    /// significant character.
    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '%' {
                while let Some(&c) = self.chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn scan_atom(&mut self) -> Option<String> {
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            _ => return None,
        }
        let mut name = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                name.push(c);
                self.bump();
            } else {
                break;
            }
        }
        Some(name)
    }

    /// Consumes `<-` if present.
    fn scan_arrow(&mut self) -> Result<bool, ParseError> {
        if self.peek() == Some('<') {
            self.bump();
            if self.peek() == Some('-') {
                self.bump();
                Ok(true)
            } else {
                Err(self.error(ParseErrorKind::UnexpectedChar('<')))
            }
        } else {
            Ok(false)
        }
    }
}

/// Parses program text. Atoms are indexed in first-appearance order and
/// clause order is preserved.
pub fn parse_program(text: &str) -> Result<LogicProgram, ParseError> {
    let mut scanner = Scanner::new(text);
    let mut atoms: Vec<Atom> = Vec::new();
    let mut index_of: HashMap<String, u32> = HashMap::new();
    let mut clauses: Vec<Clause> = Vec::new();

    let mut intern = |name: String, atoms: &mut Vec<Atom>| -> u32 {
        *index_of.entry(name.clone()).or_insert_with(|| {
            let index = atoms.len() as u32;
            atoms.push(Atom { name, index });
            index
        })
    };

    loop {
        scanner.skip_trivia();
        let Some(c) = scanner.peek() else { break };

        if c == '<' {
            return Err(scanner.error(ParseErrorKind::HeadlessClause));
        }
        let Some(head_name) = scanner.scan_atom() else {
            return Err(scanner.error(ParseErrorKind::UnexpectedChar(c)));
        };

        let mut names = vec![head_name];
        scanner.skip_trivia();
        if scanner.scan_arrow()? {
            loop {
                scanner.skip_trivia();
                let Some(name) = scanner.scan_atom() else {
                    let kind = match scanner.peek() {
                        None => ParseErrorKind::UnexpectedEnd,
                        Some(_) => ParseErrorKind::ExpectedAtom,
                    };
                    return Err(scanner.error(kind));
                };
                names.push(name);
                scanner.skip_trivia();
                if scanner.peek() == Some(',') {
                    scanner.bump();
                } else {
                    break;
                }
            }
        }
        scanner.skip_trivia();
        match scanner.peek() {
            Some('.') => {
                scanner.bump();
            }
            None => return Err(scanner.error(ParseErrorKind::UnexpectedEnd)),
            Some(_) => return Err(scanner.error(ParseErrorKind::ExpectedDot)),
        }

        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(scanner.error(ParseErrorKind::DuplicateAtom(name.clone())));
            }
        }
        let mut indices: Vec<u32> =
            names.into_iter().map(|n| intern(n, &mut atoms)).collect();
        let head = indices.remove(0);
        let clause = Clause::new(head, indices).expect("duplicates checked above");
        clauses.push(clause);
    }

    Ok(LogicProgram::new(atoms, clauses).expect("parser output satisfies program invariants"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_fact() {
        let p = parse_program("C.").unwrap();
        assert_eq!(p.num_atoms(), 1);
        assert_eq!(p.clauses().len(), 1);
        assert_eq!(p.clauses()[0].arity(), 1);
        assert_eq!(p.atom_name(0), "C");
    }

    #[test]
    fn atoms_indexed_in_first_appearance_order() {
        let p = parse_program("A <- B, C.\nD <- B.\nC.").unwrap();
        assert_eq!(p.clauses().len(), 3);
        let names: Vec<&str> = p.atoms().iter().map(|a| a.name.as_str()).collect();
        assert_eq!(names, vec!["A", "B", "C", "D"]);
        assert_eq!(p.clauses()[1].head(), 3);
        assert_eq!(p.clauses()[1].body(), &[1]);
    }

    #[test]
    fn duplicate_atom_rejected() {
        let err = parse_program("A <- B, A.").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::DuplicateAtom("A".into()));
        let err = parse_program("A <- B, B.").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::DuplicateAtom("B".into()));
    }

    #[test]
    fn headless_clause_rejected() {
        let err = parse_program("<- B, C.").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::HeadlessClause);
    }

    #[test]
    fn comments_and_whitespace_ignored() {
        let p = parse_program("% a knowledge base\n  A<-B , C .\n% tail\nC.").unwrap();
        assert_eq!(p.clauses().len(), 2);
        assert_eq!(p.clauses()[0].arity(), 3);
    }

    #[test]
    fn error_positions() {
        let err = parse_program("A <- B\nC.").unwrap_err();
        // `C` follows where `.` or `,` was required
        assert_eq!(err.kind, ParseErrorKind::ExpectedDot);
        assert_eq!((err.line, err.column), (2, 1));

        let err = parse_program("A <-").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnexpectedEnd);

        let err = parse_program("1up.").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnexpectedChar('1'));
        assert_eq!((err.line, err.column), (1, 1));
    }

    #[test]
    fn missing_dot_at_end() {
        let err = parse_program("A <- B").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnexpectedEnd);
    }

    #[test]
    fn empty_input_is_empty_program() {
        let p = parse_program("").unwrap();
        assert_eq!(p.num_atoms(), 0);
        assert!(p.clauses().is_empty());
    }
}
