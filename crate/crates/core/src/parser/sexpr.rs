use crate::model::Span;

use super::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub enum SExpr {
    Atom(String, Span),
    List(Vec<SExpr>, Span),
}

impl SExpr {
    pub fn span(&self) -> Span {
        match self {
            SExpr::Atom(_, s) | SExpr::List(_, s) => *s,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(a, _) => Some(a),
            SExpr::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items, _) => Some(items),
            SExpr::Atom(..) => None,
        }
    }

    /// First element of a list, when it is an atom.
    pub fn head(&self) -> Option<&str> {
        self.as_list().and_then(|l| l.first()).and_then(|h| h.as_atom())
    }
}

/// Read every top-level expression. Symbols are lower-cased.
pub fn read_all(text: &str) -> Result<Vec<SExpr>, ParseError> {
    let mut stack: Vec<(Vec<SExpr>, Span)> = Vec::new();
    let mut out = Vec::new();
    let mut line = 1u32;
    let mut col = 1u32;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let here = Span { line, col };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '(' => {
                chars.next();
                col += 1;
                stack.push((Vec::new(), here));
            }
            ')' => {
                chars.next();
                col += 1;
                let (items, span) = stack
                    .pop()
                    .ok_or_else(|| ParseError::syntax(here, "unbalanced `)`"))?;
                let e = SExpr::List(items, span);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(e),
                    None => out.push(e),
                }
            }
            _ => {
                let mut sym = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    sym.extend(c.to_lowercase());
                    chars.next();
                    col += 1;
                }
                let e = SExpr::Atom(sym, here);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(e),
                    None => out.push(e),
                }
            }
        }
    }
    if let Some((_, span)) = stack.pop() {
        return Err(ParseError::syntax(span, "unclosed `(`"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_with_positions() {
        let es = read_all("; c\n(a (B c))\n").unwrap();
        assert_eq!(es.len(), 1);
        assert_eq!(es[0].span(), Span { line: 2, col: 1 });
        let l = es[0].as_list().unwrap();
        assert_eq!(l[1].head(), Some("b"));
        assert_eq!(l[1].as_list().unwrap()[1].span(), Span { line: 2, col: 7 });
    }

    #[test]
    fn reports_unbalanced_parens() {
        let err = read_all("(a\n (b)").unwrap_err();
        assert!(err.to_string().contains("1:1"));
        assert!(read_all("a)").is_err());
    }
}
