//! Oval-nesting schemes such as `<J u 15>` or `<18 u 1<3>>`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::geometry::{build_arrangement, harnack_bound, CurveInput, CurveLabel, GeometryError, PLLoop, ProjRay};
use crate::surface::{regions, RegionError, Side};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SchemeError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("the one-sided component J cannot lie inside an oval (position {0})")]
    Nesting(usize),
    #[error("{components} components exceed the Harnack bound {bound} for degree {degree}")]
    Harnack { degree: u32, components: usize, bound: u64 },
    #[error("degree {degree} is {} but the scheme {} a one-sided component", if degree % 2 == 0 { "even" } else { "odd" }, if *has_j { "has" } else { "lacks" })]
    Parity { degree: u32, has_j: bool },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Region(#[from] RegionError),
}

/// An oval together with the ovals immediately inside its disk.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Node {
    pub children: Vec<Node>,
}

impl Node {
    pub fn leaf() -> Node {
        Node::default()
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Node::size).sum::<usize>()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Scheme {
    pub roots: Vec<Node>,
    pub has_j: bool,
}

impl Scheme {
    pub fn ovals(&self) -> usize {
        self.roots.iter().map(Node::size).sum()
    }

    pub fn components(&self) -> usize {
        self.ovals() + usize::from(self.has_j)
    }
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    at: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.at < self.chars.len() && self.chars[self.at].1.is_whitespace() {
            self.at += 1;
        }
    }

    fn pos(&self) -> usize {
        self.chars.get(self.at).map_or(self.src.len(), |c| c.0)
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.at).map(|c| c.1)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, SchemeError> {
        Err(SchemeError::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn expect(&mut self, c: char) -> Result<(), SchemeError> {
        if self.peek() == Some(c) {
            self.at += 1;
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    /// Parses `"<" [items] ">"` and returns the nodes, plus the J flag.
    fn group(&mut self, top: bool) -> Result<(Vec<Node>, bool), SchemeError> {
        self.expect('<')?;
        let mut nodes = Vec::new();
        let mut has_j = false;
        if self.peek() == Some('>') {
            self.at += 1;
            return Ok((nodes, has_j));
        }
        loop {
            match self.peek() {
                Some('J') => {
                    if !top {
                        return Err(SchemeError::Nesting(self.pos()));
                    }
                    if has_j {
                        return self.err("at most one J");
                    }
                    has_j = true;
                    self.at += 1;
                }
                Some(c) if c.is_ascii_digit() => {
                    let start = self.pos();
                    let mut count: usize = 0;
                    while let Some(&(_, d)) = self.chars.get(self.at) {
                        let Some(v) = d.to_digit(10) else { break };
                        count = match count.checked_mul(10).and_then(|c| c.checked_add(v as usize)) {
                            Some(c) => c,
                            None => return self.err("count too large"),
                        };
                        self.at += 1;
                    }
                    if count == 0 {
                        return Err(SchemeError::Syntax { pos: start, msg: "counts must be positive".into() });
                    }
                    let children = if self.peek() == Some('<') { self.group(false)?.0 } else { Vec::new() };
                    nodes.extend(std::iter::repeat_n(Node { children }, count));
                }
                _ => return self.err("expected 'J' or a count"),
            }
            match self.peek() {
                Some('>') => {
                    self.at += 1;
                    return Ok((nodes, has_j));
                }
                Some('u' | '+' | '⊔') => self.at += 1,
                _ => return self.err("expected a separator or '>'"),
            }
        }
    }
}

pub fn parse_scheme(text: &str) -> Result<Scheme, SchemeError> {
    let mut p = Parser { chars: text.char_indices().collect(), at: 0, src: text };
    let (roots, has_j) = p.group(true)?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(Scheme { roots, has_j })
}

fn format_items(nodes: &[Node]) -> Vec<String> {
    // Canonical key of a node is the text of its interior; group equal ones.
    let mut groups: BTreeMap<(usize, String), usize> = BTreeMap::new();
    for n in nodes {
        let inner = if n.children.is_empty() { String::new() } else { format!("<{}>", format_items(&n.children).join(" u ")) };
        *groups.entry((n.size(), inner)).or_default() += 1;
    }
    groups.into_iter().map(|((_, inner), count)| format!("{count}{inner}")).collect()
}

pub fn format_scheme(s: &Scheme) -> String {
    let mut items = Vec::new();
    if s.has_j {
        items.push("J".to_string());
    }
    items.extend(format_items(&s.roots));
    format!("<{}>", items.join(" u "))
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_scheme(self))
    }
}

/// Canonical form (equal schemes compare equal after this).
pub fn canonical(s: &Scheme) -> Scheme {
    parse_scheme(&format_scheme(s)).expect("formatted schemes parse")
}

/// Each oval becomes `s` nested copies; J becomes ⌊s/2⌋ ovals enclosing
/// everything else, plus J itself when `s` is odd.
pub fn parallel_copies(scheme: &Scheme, s: usize) -> Scheme {
    assert!(s >= 1, "at least one copy");
    fn copy(n: &Node, s: usize) -> Node {
        let mut inner = Node { children: n.children.iter().map(|c| copy(c, s)).collect() };
        for _ in 1..s {
            inner = Node { children: vec![inner] };
        }
        inner
    }
    let mut roots: Vec<Node> = scheme.roots.iter().map(|n| copy(n, s)).collect();
    if scheme.has_j {
        for _ in 0..s / 2 {
            roots = vec![Node { children: roots }];
        }
    }
    Scheme { roots, has_j: scheme.has_j && s % 2 == 1 }
}

/// Axis-parallel counter-clockwise rectangle in the chart z = 1.
pub(crate) fn rect(x0: i64, y0: i64, x1: i64, y1: i64) -> PLLoop {
    let r = |x: i64, y: i64| ProjRay::new(x, y, 1).expect("nonzero");
    PLLoop::oval(vec![r(x1, y1), r(x0, y1), r(x0, y0), r(x1, y0)]).expect("valid rectangle")
}

/// Width and height of the box needed for a node's square and its contents.
fn extent(n: &Node) -> (i64, i64) {
    if n.children.is_empty() {
        return (2, 2);
    }
    let (mut w, mut h) = (2, 0);
    for c in &n.children {
        let (cw, ch) = extent(c);
        w += cw + 2;
        h = h.max(ch);
    }
    (w, h + 4)
}

/// Places `nodes` in a row starting at `x`, vertically centred on `y`.
fn place(nodes: &[Node], mut x: i64, y: i64, out: &mut Vec<PLLoop>) {
    for n in nodes {
        let (w, h) = extent(n);
        // doubled coordinates keep the centre integral
        out.push(rect(x, y - h, x + 2 * w, y + h));
        place(&n.children, x + 4, y, out);
        x += 2 * w + 4;
    }
}

/// A piecewise-linear curve of the given degree realizing the scheme.
pub fn realize_scheme(scheme: &Scheme, degree: u32) -> Result<CurveInput, SchemeError> {
    if (degree % 2 == 1) != scheme.has_j {
        return Err(SchemeError::Parity { degree, has_j: scheme.has_j });
    }
    let bound = harnack_bound(degree);
    if scheme.components() as u64 > bound {
        return Err(SchemeError::Harnack { degree, components: scheme.components(), bound });
    }
    let mut loops = Vec::new();
    if scheme.has_j {
        let (w, h) = scheme.roots.iter().map(extent).fold((0, 0), |(w, h), (cw, ch)| (w + 2 * cw + 4, h.max(ch)));
        let (p, c) = (w + 10, h + 10);
        let j = PLLoop::one_sided(vec![ProjRay::new(1, 0, 0)?, ProjRay::new(p, -c, 1)?, ProjRay::new(-p, -c, 1)?])?;
        loops.push(j);
    }
    place(&scheme.roots, 0, 0, &mut loops);
    let curve = CurveInput { label: CurveLabel::A, degree, loops, type_one: true };
    Ok(curve)
}

/// Nesting structure of a single embedded curve.
pub fn recognize(curve: &CurveInput) -> Result<Scheme, SchemeError> {
    let single = CurveInput { label: CurveLabel::A, ..curve.clone() };
    let map = build_arrangement(&[single])?;
    let rs = regions(&map)?;
    let j = rs.curve_components.iter().position(|c| c.one_sided);
    let root = match j {
        Some(k) => rs.regions.iter().position(|r| r.adjacent.iter().any(|a| a.0 == k)).expect("J borders a region"),
        None => rs.non_orientable().unwrap_or(0),
    };
    // Walk outward-in: each oval's disk is the side away from the root.
    fn build(rs: &crate::surface::RegionSet, region: usize, via: Option<usize>) -> Vec<Node> {
        let mut out = Vec::new();
        for &(k, side) in &rs.regions[region].adjacent {
            if Some(k) == via || side == Side::Both {
                continue;
            }
            let other = rs.regions.iter().position(|r| r.id != region && r.adjacent.iter().any(|a| a.0 == k)).expect("two sides");
            out.push(Node { children: build(rs, other, Some(k)) });
        }
        out
    }
    let roots = build(&rs, root, None);
    Ok(canonical(&Scheme { roots, has_j: j.is_some() }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let s = parse_scheme("<18 u 1<3>>").unwrap();
        assert_eq!(s.ovals(), 22);
        assert_eq!(s.roots.len(), 19);
        assert!(!s.has_j);
        let s = parse_scheme("<J u 15>").unwrap();
        assert!(s.has_j);
        assert_eq!(s.components(), 16);
        assert_eq!(parse_scheme("<>").unwrap(), Scheme::default());
        assert_eq!(parse_scheme("< 1 ⊔ 2 + 1<1> >").unwrap().ovals(), 5);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_scheme("<1<J>>"), Err(SchemeError::Nesting(_))));
        assert!(matches!(parse_scheme("<0>"), Err(SchemeError::Syntax { .. })));
        assert!(matches!(parse_scheme("<1 u>"), Err(SchemeError::Syntax { .. })));
        assert!(matches!(parse_scheme("<1"), Err(SchemeError::Syntax { .. })));
        assert!(matches!(parse_scheme("<1> x"), Err(SchemeError::Syntax { pos: 4, .. })));
        assert!(matches!(parse_scheme("<J u J>"), Err(SchemeError::Syntax { .. })));
    }

    #[test]
    fn format_examples() {
        assert_eq!(format_scheme(&parse_scheme("<1<3> u 18>").unwrap()), "<18 u 1<3>>");
        assert_eq!(format_scheme(&Scheme::default()), "<>");
        assert_eq!(format_scheme(&parse_scheme("<1>").unwrap()), "<1>");
        assert_eq!(format_scheme(&parse_scheme("<1 + 15 u J>").unwrap()), "<J u 16>");
        assert_eq!(format_scheme(&parse_scheme("<1<1> u 1<1<1>> u 1<1>>").unwrap()), "<2<1> u 1<1<1>>>");
    }

    #[test]
    fn copies_examples() {
        let f = |s: &str, k| format_scheme(&parallel_copies(&parse_scheme(s).unwrap(), k));
        assert_eq!(f("<1>", 2), "<1<1>>");
        assert_eq!(f("<J>", 2), "<1>");
        assert_eq!(f("<J>", 3), "<J u 1>");
        assert_eq!(f("<J u 2>", 4), "<1<1<2<1<1<1>>>>>>");
        assert_eq!(f("<1<2>>", 1), "<1<2>>");
    }

    #[test]
    fn realize_then_recognize() {
        for s in ["<1>", "<18 u 1<3>>", "<J u 15>", "<>", "<J>", "<2<1<1>> u 1>"] {
            let sch = parse_scheme(s).unwrap();
            let degree = if sch.has_j { 7 } else { 8 };
            let c = realize_scheme(&sch, degree).unwrap();
            c.validate().unwrap();
            assert_eq!(format_scheme(&recognize(&c).unwrap()), format_scheme(&sch));
        }
    }

    #[test]
    fn realize_errors() {
        let s = parse_scheme("<J u 16>").unwrap();
        assert!(matches!(realize_scheme(&s, 7), Err(SchemeError::Harnack { bound: 16, .. })));
        assert!(matches!(realize_scheme(&s, 8), Err(SchemeError::Parity { .. })));
    }
}
