//! Scheme corpora the suites run over.

use std::collections::BTreeSet;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::forms::binomial;
use crate::scalar::SeedStream;
use crate::schemes::{Coord, SchemeRecipe};
use crate::verifier::rules::Family;

/// What a corpus entry stands for: a scheme, or the irrelevant ideal `M`
/// (used by the negative control).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Subject {
    Scheme { recipe: SchemeRecipe },
    Maximal { ambient: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub key: String,
    pub subject: Subject,
    pub families: Vec<Family>,
}

impl CorpusEntry {
    pub fn scheme(recipe: SchemeRecipe, mut families: Vec<Family>) -> Self {
        families.sort();
        families.dedup();
        CorpusEntry { key: recipe.id(), subject: Subject::Scheme { recipe }, families }
    }

    pub fn maximal(ambient: usize) -> Self {
        CorpusEntry { key: format!("M-N{ambient}"), subject: Subject::Maximal { ambient }, families: vec![Family::Maximal] }
    }

    /// Classifies a user-supplied recipe by its constructor.
    pub fn from_recipe(recipe: SchemeRecipe) -> Self {
        let families = match &recipe {
            SchemeRecipe::Star { ambient, s, .. } if s == ambient => vec![Family::Star, Family::CompleteIntersection],
            SchemeRecipe::Star { .. } => vec![Family::Star],
            SchemeRecipe::General { ambient, n, .. } => general_families(*ambient, *n),
            SchemeRecipe::Explicit { .. } => vec![Family::Explicit],
        };
        Self::scheme(recipe, families)
    }

    pub fn ambient(&self) -> usize {
        match &self.subject {
            Subject::Scheme { recipe } => recipe.ambient(),
            Subject::Maximal { ambient } => *ambient,
        }
    }

    pub fn point_count(&self) -> usize {
        match &self.subject {
            Subject::Scheme { recipe } => recipe.point_count(),
            Subject::Maximal { .. } => 0,
        }
    }

    pub fn recipe(&self) -> Option<&SchemeRecipe> {
        match &self.subject {
            Subject::Scheme { recipe } => Some(recipe),
            Subject::Maximal { .. } => None,
        }
    }

    pub fn has(&self, f: Family) -> bool {
        self.families.contains(&f)
    }

    /// Whether every point has multiplicity one.
    pub fn is_radical(&self) -> bool {
        match &self.subject {
            Subject::Scheme { recipe: SchemeRecipe::Explicit { points, .. } } => points.iter().all(|(_, m)| *m == 1),
            _ => true,
        }
    }

    /// Degree of the `m`-th symbolic power of the scheme, i.e. the number of
    /// linear conditions it imposes in large degree.
    pub fn degree_at(&self, m: usize) -> usize {
        let n = self.ambient();
        match &self.subject {
            Subject::Scheme { recipe: SchemeRecipe::Explicit { points, .. } } => {
                points.iter().map(|(_, k)| binomial(m * *k as usize + n - 1, n)).sum()
            }
            Subject::Scheme { recipe } => recipe.point_count() * binomial(m + n - 1, n),
            Subject::Maximal { .. } => 0,
        }
    }
}

fn general_families(ambient: usize, n: usize) -> Vec<Family> {
    let mut f = vec![Family::General];
    // Few general points are complete intersections or stars.
    let ci = match ambient {
        2 => matches!(n, 1 | 2 | 4),
        _ => matches!(n, 1 | 2),
    };
    if ci {
        f.push(Family::CompleteIntersection);
    }
    if n == ambient + 1 {
        f.push(Family::Star);
    }
    f
}

pub fn stars(ambient: usize, sizes: &[usize], seed: u64) -> Vec<CorpusEntry> {
    sizes.iter().map(|&s| CorpusEntry::from_recipe(SchemeRecipe::star(ambient, s, seed))).collect()
}

pub fn general(ambient: usize, counts: impl IntoIterator<Item = usize>, seeds: &[u64]) -> Vec<CorpusEntry> {
    let mut out = Vec::new();
    for n in counts {
        for &seed in seeds {
            out.push(CorpusEntry::from_recipe(SchemeRecipe::general(ambient, n, seed)));
        }
    }
    out
}

/// The four plane configurations of at most eight points singled out as
/// the exceptions to `gamma >= (2 alpha + 1) / 3`.
pub fn exceptional_fixtures() -> Vec<CorpusEntry> {
    let three_star: &[&[i64]] = &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]];
    // Lines x0, x1, x2 and x0 + x1 + x2.
    let six_star: &[&[i64]] = &[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0], &[0, 1, -1], &[1, 0, -1], &[1, -1, 0]];
    // One more point on each coordinate line; the three new points are not collinear.
    let three_plus_three: &[&[i64]] = &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[0, 1, 1], &[1, 0, 2], &[3, 1, 0]];
    let six_plus_one: Vec<&[i64]> = six_star.iter().copied().chain([&[0, 1, 2][..]]).collect();
    let build = |name: &str, pts: &[&[i64]], star: bool| {
        let points: Vec<(&[i64], u32)> = pts.iter().map(|p| (*p, 1)).collect();
        let mut families = vec![Family::Fixture, Family::Explicit];
        if star {
            families.push(Family::Star);
        }
        CorpusEntry::scheme(SchemeRecipe::explicit_integral(name, 2, &points), families)
    };
    vec![
        build("fixture-star3", three_star, true),
        build("fixture-star4", six_star, true),
        build("fixture-star3-plus3", three_plus_three, false),
        build("fixture-star4-plus1", &six_plus_one, false),
    ]
}

/// Small explicit schemes with integer coordinates, usable over the
/// rationals.
pub fn explicit_small() -> Vec<CorpusEntry> {
    let e = |name: &str, n: usize, pts: &[(&[i64], u32)]| {
        CorpusEntry::scheme(SchemeRecipe::explicit_integral(name, n, pts), vec![Family::Explicit])
    };
    vec![
        e("explicit-coordinate-triangle", 2, &[(&[1, 0, 0], 1), (&[0, 1, 0], 1), (&[0, 0, 1], 1)]),
        e("explicit-grid-2x2", 2, &[(&[1, 0, 0], 1), (&[1, 1, 0], 1), (&[1, 0, 1], 1), (&[1, 1, 1], 1)]),
        e("explicit-collinear-3", 2, &[(&[1, 0, 0], 1), (&[1, 1, 0], 1), (&[1, 2, 0], 1)]),
        e(
            "explicit-conic-5",
            2,
            &[(&[1, 0, 0], 1), (&[1, 1, 1], 1), (&[1, 2, 4], 1), (&[1, 3, 9], 1), (&[1, -1, 1], 1)],
        ),
        e("explicit-fat-pair", 2, &[(&[1, 0, 0], 2), (&[0, 1, 0], 1)]),
        e("explicit-space-4", 3, &[(&[1, 0, 0, 0], 1), (&[0, 1, 0, 0], 1), (&[0, 0, 1, 0], 1), (&[1, 1, 1, 1], 1)]),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shape {
    Scattered,
    Line,
    Conic,
    Grid,
}

impl Shape {
    fn name(&self) -> &'static str {
        match self {
            Shape::Scattered => "scattered",
            Shape::Line => "line",
            Shape::Conic => "conic",
            Shape::Grid => "grid",
        }
    }
}

/// Primitive representative with positive leading entry.
fn canonical(mut v: Vec<i64>) -> Option<Vec<i64>> {
    let g = v.iter().fold(0i64, |g, x| g.gcd(x));
    if g == 0 {
        return None;
    }
    let lead = *v.iter().find(|x| **x != 0).unwrap();
    let g = if lead < 0 { -g } else { g };
    v.iter_mut().for_each(|x| *x /= g);
    Some(v)
}

fn signed(stream: &mut SeedStream, bound: i64) -> i64 {
    stream.below((2 * bound + 1) as u64) as i64 - bound
}

/// Draws `n` distinct integer points in the plane of the given shape. Lines
/// and conics carry between three and five of the points, so the rest stay
/// scattered and the regularity stays small.
fn draw(shape: Shape, n: usize, stream: &mut SeedStream) -> Vec<Vec<i64>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut push = |v: Vec<i64>, out: &mut Vec<Vec<i64>>| {
        if let Some(c) = canonical(v) {
            if seen.insert(c.clone()) {
                out.push(c);
            }
        }
    };
    let special = match shape {
        Shape::Scattered => 0,
        Shape::Line | Shape::Conic => (3 + stream.below(3) as usize).min(n),
        Shape::Grid => n,
    };
    let (a, b) = (signed(stream, 5), signed(stream, 5));
    let mut guard = 0;
    while out.len() < special && guard < 10_000 {
        guard += 1;
        let v = match shape {
            // x2 = a x0 + b x1.
            Shape::Line => {
                let (u, w) = (signed(stream, 9), signed(stream, 9));
                vec![u, w, a * u + b * w]
            }
            // The image of [u : v] under the Veronese map x0 x2 = x1^2.
            Shape::Conic => {
                let (u, w) = (signed(stream, 6), signed(stream, 6));
                vec![u * u, u * w, w * w]
            }
            Shape::Grid => vec![1, stream.below(4) as i64, stream.below(4) as i64],
            Shape::Scattered => unreachable!(),
        };
        push(v, &mut out);
    }
    while out.len() < n && guard < 20_000 {
        guard += 1;
        let v = vec![signed(stream, 9), signed(stream, 9), signed(stream, 9)];
        push(v, &mut out);
    }
    out
}

/// Seeded random radical configurations in the plane: `per_seed` schemes
/// for each seed, cycling through scattered, collinear-rich, conic-rich and
/// grid shapes with `3 <= n <= 12` (at most 16 for grids by construction).
pub fn random_configurations(seeds: &[u64], per_seed: usize) -> Vec<CorpusEntry> {
    let shapes = [Shape::Scattered, Shape::Line, Shape::Conic, Shape::Grid];
    let mut out = Vec::new();
    for &seed in seeds {
        let mut stream = SeedStream::derived(seed, "random-configurations");
        for i in 0..per_seed {
            let shape = shapes[i % shapes.len()];
            let n = 3 + stream.below(10) as usize;
            let pts = draw(shape, n, &mut stream);
            let name = format!("random-{}-n{}-seed{}-{}", shape.name(), pts.len(), seed, i);
            let points = pts.into_iter().map(|p| (p.into_iter().map(Coord::int).collect(), 1)).collect();
            let recipe = SchemeRecipe::Explicit { name, ambient: 2, points };
            out.push(CorpusEntry::scheme(recipe, vec![Family::Random, Family::Explicit]));
        }
    }
    out
}

/// Stars, general points and fixtures in the plane.
pub fn plane(seeds: &[u64]) -> Vec<CorpusEntry> {
    let mut out = stars(2, &[3, 4, 5, 6], 1);
    out.extend(general(2, 1..=10, seeds));
    out.extend(exceptional_fixtures());
    out
}

/// Stars and a few general points in `P^3`.
pub fn space(seeds: &[u64]) -> Vec<CorpusEntry> {
    let mut out = stars(3, &[4, 5], 1);
    out.extend(general(3, 1..=5, seeds));
    out
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{PrimeField, Rationals};

    #[test]
    fn random_corpus_is_deterministic_and_valid() {
        let a = random_configurations(&[1, 2], 60);
        let b = random_configurations(&[1, 2], 60);
        assert_eq!(a, b);
        assert_eq!(a.len(), 120);
        let keys: BTreeSet<&str> = a.iter().map(|e| e.key.as_str()).collect();
        assert_eq!(keys.len(), a.len());
        for e in &a {
            assert!((3..=12).contains(&e.point_count()), "{}", e.key);
            let z = e.recipe().unwrap().realize(&Rationals).unwrap();
            assert_eq!(z.len(), e.point_count());
        }
    }

    #[test]
    fn fixtures_realize() {
        let f = PrimeField::default();
        let sizes: Vec<usize> =
            exceptional_fixtures().iter().map(|e| e.recipe().unwrap().realize(&f).unwrap().len()).collect();
        assert_eq!(sizes, vec![3, 6, 6, 7]);
        for e in explicit_small() {
            e.recipe().unwrap().realize(&Rationals).unwrap();
        }
    }

    #[test]
    fn degrees_of_symbolic_powers() {
        let e = CorpusEntry::from_recipe(SchemeRecipe::star(3, 5, 1));
        assert_eq!(e.degree_at(2), 10 * 4);
        let fat = &explicit_small()[4];
        assert_eq!(fat.degree_at(1), 3 + 1);
        assert_eq!(fat.degree_at(2), 10 + 3);
    }

    #[test]
    fn general_families_tag_small_cases() {
        assert!(CorpusEntry::from_recipe(SchemeRecipe::general(2, 4, 1)).has(Family::CompleteIntersection));
        assert!(CorpusEntry::from_recipe(SchemeRecipe::general(2, 3, 1)).has(Family::Star));
        assert!(CorpusEntry::from_recipe(SchemeRecipe::general(3, 4, 1)).has(Family::Star));
        assert!(!CorpusEntry::from_recipe(SchemeRecipe::general(2, 5, 1)).has(Family::CompleteIntersection));
    }
}
