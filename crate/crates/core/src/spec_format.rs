//! Line-oriented scheme-spec files.
//!
//! ```text
//! # comment
//! field: prime 2147483647        # or: field: rationals
//! N: 2
//! star: {s: 4, seed: 7}          # or: star: {s: 4, hyperplanes: [[1,0,0], ...]}
//! ```
//!
//! The constructor line is one of `star: {..}`, `general: {n: <int>, seed: <int>}`
//! or `points:` followed by lines `- [c0, ..., cN] x <mult>`, where
//! coordinates are integers or fractions `a/b`. An optional `name: <text>`
//! line names an explicit scheme.

use std::fmt::Write as _;

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::scalar::{Field, FieldConfig, Scalar};
use crate::schemes::{Coord, FatPointScheme, SchemeRecipe, StarSource};

/// A parsed spec: the field to compute over and the scheme constructor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeSpec {
    pub field: FieldConfig,
    pub recipe: SchemeRecipe,
}

impl SchemeSpec {
    pub fn realize<F: Field>(&self, field: &F) -> Result<FatPointScheme<F::Elem>> {
        self.recipe.realize(field)
    }
}

/// The scheme as an explicit list of its normalized points.
pub fn explicit_spec<F: Field>(field: &F, z: &FatPointScheme<F::Elem>, name: &str) -> Result<SchemeSpec> {
    let coord = |e: &F::Elem| -> Result<Coord> {
        match field.to_scalar(e) {
            Scalar::Prime { value, .. } => Ok(Coord::int(value as i64)),
            Scalar::Rational(q) => match (q.numer().to_i64(), q.denom().to_i64()) {
                (Some(num), Some(den)) => Ok(Coord { num, den }),
                _ => Err(Error::InvalidParameter(format!("coordinate {q} does not fit in 64 bits"))),
            },
        }
    };
    let points = z
        .entries()
        .iter()
        .map(|(p, m)| Ok((p.coords().iter().map(coord).collect::<Result<Vec<_>>>()?, *m)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SchemeSpec {
        field: field.config(),
        recipe: SchemeRecipe::Explicit { name: name.to_string(), ambient: z.ambient(), points },
    })
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

/// Cursor over one line; columns are 1-based character positions.
struct Cursor<'a> {
    line: usize,
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(line: usize, text: &'a str, pos: usize) -> Self {
        Cursor { line, text, pos }
    }

    fn col(&self) -> usize {
        self.text[..self.pos].chars().count() + 1
    }

    fn fail(&self, message: impl Into<String>) -> Error {
        err(self.line, self.col(), message)
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.fail(format!("expected '{c}'")))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn word(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if !(c.is_ascii_alphanumeric() || c == '_') {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.fail("expected a word"));
        }
        Ok(&self.text[start..self.pos])
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.peek(), Some('-' | '+')) {
            self.pos += 1;
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let s = &self.text[start..self.pos];
        s.parse().map_err(|_| err(self.line, Cursor::new(self.line, self.text, start).col(), "expected an integer"))
    }

    fn unsigned(&mut self) -> Result<u64> {
        self.skip_ws();
        let at = self.col();
        let v = self.int()?;
        u64::try_from(v).map_err(|_| err(self.line, at, "expected a non-negative integer"))
    }

    fn coord(&mut self) -> Result<Coord> {
        self.skip_ws();
        let at = self.col();
        let num = self.int()?;
        let den = if self.eat('/') { self.int()? } else { 1 };
        if den == 0 {
            return Err(err(self.line, at, "zero denominator"));
        }
        Ok(Coord { num, den })
    }

    fn int_list(&mut self) -> Result<Vec<i64>> {
        self.expect('[')?;
        let mut out = Vec::new();
        if self.eat(']') {
            return Ok(out);
        }
        loop {
            out.push(self.int()?);
            if self.eat(']') {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    fn end(&mut self) -> Result<()> {
        self.skip_ws();
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.fail("unexpected trailing text")),
        }
    }
}

enum MapValue {
    Int(u64),
    Lists(Vec<Vec<i64>>),
}

/// `{key: value, ...}` with integer or list-of-integer-lists values.
fn parse_map(c: &mut Cursor<'_>) -> Result<Vec<(String, usize, MapValue)>> {
    c.expect('{')?;
    let mut out = Vec::new();
    if c.eat('}') {
        return Ok(out);
    }
    loop {
        c.skip_ws();
        let at = c.col();
        let key = c.word()?.to_string();
        c.expect(':')?;
        c.skip_ws();
        let value = if c.peek() == Some('[') {
            c.expect('[')?;
            let mut lists = Vec::new();
            if !c.eat(']') {
                loop {
                    lists.push(c.int_list()?);
                    if c.eat(']') {
                        break;
                    }
                    c.expect(',')?;
                }
            }
            MapValue::Lists(lists)
        } else {
            MapValue::Int(c.unsigned()?)
        };
        if out.iter().any(|(k, _, _)| *k == key) {
            return Err(err(c.line, at, format!("duplicate key '{key}'")));
        }
        out.push((key, at, value));
        if c.eat('}') {
            return Ok(out);
        }
        c.expect(',')?;
    }
}

struct MapReader {
    line: usize,
    entries: Vec<(String, usize, MapValue)>,
}

impl MapReader {
    fn take(&mut self, key: &str) -> Option<(usize, MapValue)> {
        let i = self.entries.iter().position(|(k, _, _)| k == key)?;
        let (_, at, v) = self.entries.remove(i);
        Some((at, v))
    }

    fn int(&mut self, key: &str, close: usize) -> Result<u64> {
        match self.take(key) {
            Some((_, MapValue::Int(v))) => Ok(v),
            Some((at, MapValue::Lists(_))) => Err(err(self.line, at, format!("'{key}' must be an integer"))),
            None => Err(err(self.line, close, format!("missing key '{key}'"))),
        }
    }

    fn only(&self, allowed: &[&str]) -> Result<()> {
        match self.entries.iter().find(|(k, _, _)| !allowed.contains(&k.as_str())) {
            Some((k, at, _)) => Err(err(self.line, *at, format!("unknown key '{k}'"))),
            None => Ok(()),
        }
    }
}

fn to_usize(v: u64, line: usize, col: usize) -> Result<usize> {
    usize::try_from(v).map_err(|_| err(line, col, "value out of range"))
}

/// Strips a trailing `#` comment.
fn content(raw: &str) -> &str {
    raw.split('#').next().unwrap_or("").trim_end()
}

pub fn parse(text: &str) -> Result<SchemeSpec> {
    let mut field = None;
    let mut ambient: Option<usize> = None;
    let mut name: Option<String> = None;
    let mut recipe: Option<(usize, SchemeRecipe)> = None;
    let mut points: Option<(usize, Vec<(Vec<Coord>, u32)>)> = None;
    let lines: Vec<&str> = text.lines().collect();
    let mut i = 0;
    while i < lines.len() {
        let lineno = i + 1;
        let body = content(lines[i]);
        i += 1;
        if body.trim().is_empty() {
            continue;
        }
        let indent = body.len() - body.trim_start().len();
        if body.trim_start().starts_with('-') {
            return Err(err(lineno, indent + 1, "point line outside a 'points:' block"));
        }
        let mut c = Cursor::new(lineno, body, indent);
        let key = c.word()?;
        c.expect(':')?;
        let once = |seen: bool, c: &Cursor<'_>| {
            if seen {
                Err(err(c.line, indent + 1, format!("'{key}' given twice")))
            } else {
                Ok(())
            }
        };
        match key {
            "field" => {
                once(field.is_some(), &c)?;
                let kind_at = {
                    c.skip_ws();
                    c.col()
                };
                field = Some(match c.word()? {
                    "rationals" => FieldConfig::Rationals,
                    "prime" => {
                        let at = {
                            c.skip_ws();
                            c.col()
                        };
                        let p = c.unsigned()?;
                        FieldConfig::prime(p).map_err(|e| err(lineno, at, e.to_string()))?
                    }
                    other => return Err(err(lineno, kind_at, format!("unknown field '{other}'"))),
                });
                c.end()?;
            }
            "N" => {
                once(ambient.is_some(), &c)?;
                c.skip_ws();
                let at = c.col();
                let n = to_usize(c.unsigned()?, lineno, at)?;
                if n == 0 {
                    return Err(err(lineno, at, "N must be positive"));
                }
                ambient = Some(n);
                c.end()?;
            }
            "name" => {
                once(name.is_some(), &c)?;
                c.skip_ws();
                let v = body[c.pos..].trim();
                if v.is_empty() {
                    return Err(c.fail("empty name"));
                }
                name = Some(v.to_string());
            }
            "star" | "general" => {
                if recipe.is_some() || points.is_some() {
                    return Err(err(lineno, indent + 1, "more than one scheme constructor"));
                }
                let mut map = MapReader { line: lineno, entries: parse_map(&mut c)? };
                let close = c.col() - 1;
                c.end()?;
                let n = ambient.ok_or_else(|| err(lineno, indent + 1, "'N' must precede the constructor"))?;
                map.only(if key == "general" { &["n", "seed"] } else { &["s", "seed", "hyperplanes"] })?;
                let r = if key == "general" {
                    let count = to_usize(map.int("n", close)?, lineno, close)?;
                    let seed = map.int("seed", close)?;
                    SchemeRecipe::General { ambient: n, n: count, seed }
                } else {
                    let s = to_usize(map.int("s", close)?, lineno, close)?;
                    let source = match (map.take("seed"), map.take("hyperplanes")) {
                        (Some((_, MapValue::Int(seed))), None) => StarSource::Seed { seed },
                        (None, Some((_, MapValue::Lists(hyperplanes)))) => StarSource::Hyperplanes { hyperplanes },
                        (Some((at, _)), Some(_)) => {
                            return Err(err(lineno, at, "give either 'seed' or 'hyperplanes', not both"))
                        }
                        (Some((at, _)), None) => return Err(err(lineno, at, "'seed' must be an integer")),
                        (None, Some((at, _))) => return Err(err(lineno, at, "'hyperplanes' must be a list of lists")),
                        (None, None) => return Err(err(lineno, close, "missing key 'seed' or 'hyperplanes'")),
                    };
                    SchemeRecipe::Star { ambient: n, s, source }
                };
                recipe = Some((lineno, r));
            }
            "points" => {
                if recipe.is_some() || points.is_some() {
                    return Err(err(lineno, indent + 1, "more than one scheme constructor"));
                }
                c.end()?;
                let mut pts = Vec::new();
                while i < lines.len() {
                    let body = content(lines[i]);
                    if body.trim().is_empty() {
                        i += 1;
                        continue;
                    }
                    let ind = body.len() - body.trim_start().len();
                    if !body.trim_start().starts_with('-') {
                        break;
                    }
                    let mut pc = Cursor::new(i + 1, body, ind + 1);
                    pc.expect('[')?;
                    let mut coords = vec![pc.coord()?];
                    while !pc.eat(']') {
                        pc.expect(',')?;
                        coords.push(pc.coord()?);
                    }
                    pc.skip_ws();
                    if pc.word()? != "x" {
                        return Err(pc.fail("expected 'x <multiplicity>'"));
                    }
                    pc.skip_ws();
                    let at = pc.col();
                    let m = u32::try_from(pc.unsigned()?).map_err(|_| err(i + 1, at, "multiplicity out of range"))?;
                    if m == 0 {
                        return Err(err(i + 1, at, "multiplicity must be positive"));
                    }
                    pc.end()?;
                    pts.push((coords, m));
                    i += 1;
                }
                if pts.is_empty() {
                    return Err(err(lineno, indent + 1, "'points:' has no point lines"));
                }
                points = Some((lineno, pts));
            }
            other => return Err(err(lineno, indent + 1, format!("unknown key '{other}'"))),
        }
    }
    let last = lines.len().max(1);
    let field = field.ok_or_else(|| err(last, 1, "missing 'field' line"))?;
    let ambient = ambient.ok_or_else(|| err(last, 1, "missing 'N' line"))?;
    let recipe = match (recipe, points) {
        (Some((line, r)), None) => {
            if name.is_some() {
                return Err(err(line, 1, "'name' only applies to explicit points"));
            }
            r
        }
        (None, Some((line, pts))) => {
            if let Some((j, _)) = pts.iter().enumerate().find(|(_, (c, _))| c.len() != ambient + 1) {
                return Err(err(
                    line + 1 + j,
                    1,
                    format!("point has {} coordinates, expected {}", pts[j].0.len(), ambient + 1),
                ));
            }
            SchemeRecipe::Explicit { name: name.unwrap_or_else(|| "points".into()), ambient, points: pts }
        }
        _ => return Err(err(last, 1, "missing scheme constructor ('points', 'star' or 'general')")),
    };
    Ok(SchemeSpec { field, recipe })
}

pub fn emit(spec: &SchemeSpec) -> String {
    let mut out = String::new();
    match &spec.field {
        FieldConfig::Prime { p } => writeln!(out, "field: prime {p}").unwrap(),
        FieldConfig::Rationals => writeln!(out, "field: rationals").unwrap(),
    }
    writeln!(out, "N: {}", spec.recipe.ambient()).unwrap();
    match &spec.recipe {
        SchemeRecipe::Explicit { name, points, .. } => {
            writeln!(out, "name: {name}").unwrap();
            writeln!(out, "points:").unwrap();
            for (coords, m) in points {
                let cs: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
                writeln!(out, "  - [{}] x {m}", cs.join(", ")).unwrap();
            }
        }
        SchemeRecipe::Star { s, source: StarSource::Seed { seed }, .. } => {
            writeln!(out, "star: {{s: {s}, seed: {seed}}}").unwrap();
        }
        SchemeRecipe::Star { s, source: StarSource::Hyperplanes { hyperplanes }, .. } => {
            let hs: Vec<String> = hyperplanes
                .iter()
                .map(|h| format!("[{}]", h.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")))
                .collect();
            writeln!(out, "star: {{s: {s}, hyperplanes: [{}]}}", hs.join(", ")).unwrap();
        }
        SchemeRecipe::General { n, seed, .. } => writeln!(out, "general: {{n: {n}, seed: {seed}}}").unwrap(),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{PrimeField, Rationals};
    use proptest::prelude::*;

    #[test]
    fn star_spec() {
        let s = parse("field: prime 2147483647\nN: 2\nstar: {s: 4, seed: 7}\n").unwrap();
        assert_eq!(s.field, FieldConfig::Prime { p: 2147483647 });
        assert_eq!(s.realize(&PrimeField::default()).unwrap().len(), 6);
    }

    #[test]
    fn general_spec_is_deterministic() {
        let text = "field: prime 2147483647\nN: 2\ngeneral: {n: 5, seed: 11}\n";
        let f = PrimeField::default();
        let a = parse(text).unwrap().realize(&f).unwrap();
        let b = parse(text).unwrap().realize(&f).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn explicit_points_with_fractions_and_comments() {
        let text = "# two points\nfield: rationals\nN: 2\nname: pair\npoints:\n  - [1, 0, 0] x 2   # fat\n\n  - [1/2, 1, -3] x 1\n";
        let s = parse(text).unwrap();
        let z = s.realize(&Rationals).unwrap();
        assert_eq!(z.len(), 2);
        assert_eq!(z.max_multiplicity(), 2);
        assert_eq!(s.recipe.id(), "pair");
    }

    #[test]
    fn duplicate_points_name_the_point() {
        let s = parse("field: prime 101\nN: 2\npoints:\n - [1, 2, 3] x 1\n - [2, 4, 6] x 1\n").unwrap();
        match s.realize(&PrimeField::new(101).unwrap()) {
            Err(Error::DuplicatePoint { point }) => assert!(point.contains('1'), "{point}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn explicit_hyperplanes() {
        let s = parse("field: prime 101\nN: 2\nstar: {s: 3, hyperplanes: [[1,0,0],[0,1,0],[0,0,1]]}").unwrap();
        assert_eq!(s.realize(&PrimeField::new(101).unwrap()).unwrap().len(), 3);
        let bad = parse("field: prime 101\nN: 2\nstar: {s: 3, hyperplanes: [[1,0,0],[0,1,0],[1,1,0]]}").unwrap();
        assert!(matches!(bad.realize(&PrimeField::new(101).unwrap()), Err(Error::DegenerateStar { .. })));
    }

    fn pos(r: Result<SchemeSpec>) -> (usize, usize) {
        match r {
            Err(Error::Parse { line, column, .. }) => (line, column),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn errors_carry_line_and_column() {
        assert_eq!(pos(parse("field: prime 12\nN: 2\nstar: {s: 4, seed: 1}")), (1, 14));
        assert_eq!(pos(parse("field: prime 101\nN: 2\nstar: {s: 4, sed: 1}")), (3, 14));
        assert_eq!(pos(parse("field: prime 101\nN: 2\npoints:\n  - [1, 0 0] x 1")), (4, 11));
        assert_eq!(pos(parse("field: prime 101\nN: 2\npoints:\n  - [1, 0] x 1")), (4, 1));
        assert_eq!(pos(parse("field: prime 101\nstar: {s: 4, seed: 1}")), (2, 1));
        assert_eq!(pos(parse("field: prime 101\nN: 2\ngeneral: {n: 3, seed: 1}\nstar: {s: 4, seed: 1}")), (4, 1));
        assert_eq!(pos(parse("field: prime 101\nN: 2")), (2, 1));
        assert_eq!(pos(parse("field: finite 7\nN: 2\ngeneral: {n: 3, seed: 1}")), (1, 8));
        assert_eq!(pos(parse("field: prime 101\nN: 2\ngeneral: {n: 3, seed: 1} extra")), (3, 26));
    }

    fn coord() -> impl Strategy<Value = Coord> {
        (-50i64..50, 1i64..9).prop_map(|(num, den)| Coord { num, den })
    }

    proptest! {
        #[test]
        fn emit_then_parse_is_identity(
            pts in prop::collection::vec((prop::collection::vec(coord(), 3), 1u32..5), 1..8),
            prime in prop::bool::ANY,
        ) {
            let field = if prime { FieldConfig::Prime { p: 2147483647 } } else { FieldConfig::Rationals };
            let spec = SchemeSpec { field, recipe: SchemeRecipe::Explicit { name: "p".into(), ambient: 2, points: pts } };
            prop_assert_eq!(parse(&emit(&spec)).unwrap(), spec);
        }

        #[test]
        fn realized_schemes_round_trip(n in 1usize..9, seed in 0u64..1000) {
            let f = PrimeField::default();
            let z = SchemeRecipe::general(2, n, seed).realize(&f).unwrap();
            let spec = explicit_spec(&f, &z, "g").unwrap();
            let back = parse(&emit(&spec)).unwrap().realize(&f).unwrap();
            prop_assert_eq!(back.entries(), z.entries());
        }

        #[test]
        fn constructors_round_trip(n in 1usize..12, seed in 0u64..1000, s in 2usize..8) {
            for recipe in [SchemeRecipe::general(2, n, seed), SchemeRecipe::star(3, s, seed)] {
                let spec = SchemeSpec { field: FieldConfig::default(), recipe };
                prop_assert_eq!(parse(&emit(&spec)).unwrap(), spec);
            }
        }
    }
}
