//! The JSON theory file: a state space, observables, and optionally a
//! Wigner grid and permutation channels. Rationals are strings such as
//! `"1/2"`, `"-3"` or `"0.25"`; floating-point JSON numbers are rejected.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use wignerlab_core::exact::{parse_rational, Rational, RationalMatrix};
use wignerlab_core::geometry::{AffineFunctional, AffineMap, Shape, StateSpace};
use wignerlab_core::symmetry::{ProductGroupElement, SuppliedChannel};
use wignerlab_core::theory::Observable;
use wignerlab_core::wigner::WignerRep;

use crate::error::CliError;

/// An exact rational that serializes as `"p/q"`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exact(pub Rational);

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0.to_string())
    }
}

struct ExactVisitor;

impl<'de> Visitor<'de> for ExactVisitor {
    type Value = Exact;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a rational written as a string, e.g. \"1/2\"")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Exact, E> {
        parse_rational(v).map(Exact).map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Exact, E> {
        Ok(Exact(Rational::from_integer(v.into())))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Exact, E> {
        Ok(Exact(Rational::from_integer(v.into())))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Exact, E> {
        Err(E::custom(format!(
            "floating-point number {v} is not accepted; write it as a string such as \"1/2\""
        )))
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Exact, D::Error> {
        deserializer.deserialize_any(ExactVisitor)
    }
}

pub fn exact_vec(values: &[Rational]) -> Vec<Exact> {
    values.iter().cloned().map(Exact).collect()
}

pub fn rational_vec(values: &[Exact]) -> Vec<Rational> {
    values.iter().map(|v| v.0.clone()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Polytope,
    Ball,
}

/// `{"type": "polytope", "vertices": ..}` or `{"type": "ball", "center":
/// .., "radius": ..}`. Kept as a flat struct rather than a tagged enum so
/// that parse errors keep their line and field path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpaceDoc {
    #[serde(rename = "type")]
    pub kind: SpaceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<Exact>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<Exact>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<Exact>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalDoc {
    pub linear: Vec<Exact>,
    pub constant: Exact,
}

impl From<&AffineFunctional> for FunctionalDoc {
    fn from(f: &AffineFunctional) -> Self {
        Self {
            linear: exact_vec(&f.linear),
            constant: Exact(f.constant.clone()),
        }
    }
}

impl From<&FunctionalDoc> for AffineFunctional {
    fn from(f: &FunctionalDoc) -> Self {
        AffineFunctional::new(rational_vec(&f.linear), f.constant.0.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableDoc {
    pub name: String,
    pub outcomes: Vec<String>,
    pub effects: Vec<FunctionalDoc>,
}

/// A grid of functionals, one row per outcome of `a`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerDoc {
    pub name: String,
    /// Row observable; the first observable when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    /// Column observable; the second observable when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
    pub grid: Vec<Vec<FunctionalDoc>>,
}

/// An affine map `x ↦ matrix·x + offset`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    pub matrix: Vec<Vec<Exact>>,
    pub offset: Vec<Exact>,
}

impl From<&AffineMap> for MapDoc {
    fn from(m: &AffineMap) -> Self {
        Self {
            matrix: m.matrix.to_rows().iter().map(|r| exact_vec(r)).collect(),
            offset: exact_vec(&m.offset),
        }
    }
}

impl MapDoc {
    pub fn to_map(&self, field: &str) -> Result<AffineMap, CliError> {
        let cols = self.matrix.first().map_or(0, Vec::len);
        if self.matrix.iter().any(|r| r.len() != cols) {
            return Err(CliError::field(field, "matrix rows have different lengths"));
        }
        let rows: Vec<Vec<Rational>> = self.matrix.iter().map(|r| rational_vec(r)).collect();
        AffineMap::new(RationalMatrix::from_rows(cols, &rows), rational_vec(&self.offset))
            .map_err(|e| CliError::field(field, e))
    }
}

/// A channel for the outcome permutation `(a, b)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelDoc {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub matrix: Vec<Vec<Exact>>,
    pub offset: Vec<Exact>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoryFile {
    pub state_space: StateSpaceDoc,
    pub observables: Vec<ObservableDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wigner: Option<WignerDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub channels: Vec<ChannelDoc>,
}

/// Deserializes JSON, reporting the line, column and field of any error.
pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, CliError> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        CliError::Parse {
            line: inner.line(),
            column: inner.column(),
            field,
            message: strip_position(&inner.to_string()),
        }
    })
}

/// serde_json appends " at line L column C"; the position is reported
/// separately.
fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message.to_string(),
    }
}

pub fn parse_theory_file(text: &str) -> Result<TheoryFile, CliError> {
    from_json(text)
}

/// Pretty JSON with a trailing newline; deterministic for equal input.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

/// The parts of a theory file, converted but not yet validated.
#[derive(Clone, Debug)]
pub struct Parsed {
    pub space: StateSpace,
    pub observables: Vec<Observable>,
    pub wigner: Option<(String, WignerRep)>,
    pub channels: Vec<SuppliedChannel>,
}

impl Parsed {
    pub fn observable(&self, name: Option<&str>, position: usize) -> Result<&Observable, CliError> {
        match name {
            Some(n) => self
                .observables
                .iter()
                .find(|o| o.name() == n)
                .ok_or_else(|| CliError::Usage(format!("no observable named {n}"))),
            None => self
                .observables
                .get(position)
                .ok_or_else(|| CliError::Usage(format!("the file needs at least {} observables", position + 1))),
        }
    }

    /// Builds and checks a grid against the observables of the file.
    pub fn build_rep(&self, doc: &WignerDoc, field: &str) -> Result<WignerRep, CliError> {
        let a = self.observable(doc.a.as_deref(), 0).map_err(|e| CliError::field(&format!("{field}.a"), e))?.clone();
        let b = self.observable(doc.b.as_deref(), 1).map_err(|e| CliError::field(&format!("{field}.b"), e))?.clone();
        let grid_field = format!("{field}.grid");
        if doc.grid.len() != a.len() || doc.grid.iter().any(|r| r.len() != b.len()) {
            return Err(CliError::field(
                &grid_field,
                format!("expected {} rows of {} functionals", a.len(), b.len()),
            ));
        }
        let grid: Vec<AffineFunctional> = doc.grid.iter().flatten().map(AffineFunctional::from).collect();
        WignerRep::new(a, b, grid).map_err(|e| CliError::field(&grid_field, e))
    }

    pub fn require_wigner(&self) -> Result<(&str, &WignerRep), CliError> {
        self.wigner
            .as_ref()
            .map(|(n, w)| (n.as_str(), w))
            .ok_or_else(|| CliError::Usage("the file has no wigner section".into()))
    }
}

impl TheoryFile {
    pub fn convert(&self) -> Result<Parsed, CliError> {
        let doc = &self.state_space;
        let space = match (doc.kind, &doc.vertices, &doc.center, &doc.radius) {
            (SpaceKind::Polytope, Some(vertices), None, None) => {
                StateSpace::polytope(vertices.iter().map(|v| rational_vec(v)).collect())
            }
            (SpaceKind::Ball, None, Some(center), Some(radius)) => StateSpace::ball(rational_vec(center), radius.0.clone()),
            (SpaceKind::Polytope, ..) => {
                return Err(CliError::field("state_space", "a polytope takes exactly the field `vertices`"))
            }
            (SpaceKind::Ball, ..) => {
                return Err(CliError::field("state_space", "a ball takes exactly the fields `center` and `radius`"))
            }
        }
        .map_err(|e| CliError::field("state_space", e))?;
        let mut observables = Vec::new();
        for (i, o) in self.observables.iter().enumerate() {
            let field = format!("observables[{i}]");
            if observables.iter().any(|p: &Observable| p.name() == o.name) {
                return Err(CliError::field(&field, format!("duplicate observable name {}", o.name)));
            }
            let effects: Vec<AffineFunctional> = o.effects.iter().map(AffineFunctional::from).collect();
            let obs = Observable::new(o.name.clone(), o.outcomes.clone(), effects).map_err(|e| CliError::field(&field, e))?;
            if obs.dim() != space.ambient_dim() {
                return Err(CliError::field(
                    &field,
                    format!("effects have dimension {}, the state space {}", obs.dim(), space.ambient_dim()),
                ));
            }
            observables.push(obs);
        }
        let mut parsed = Parsed {
            space,
            observables,
            wigner: None,
            channels: Vec::new(),
        };
        if let Some(w) = &self.wigner {
            let rep = parsed.build_rep(w, "wigner")?;
            parsed.wigner = Some((w.name.clone(), rep));
        }
        for (i, c) in self.channels.iter().enumerate() {
            let field = format!("channels[{i}]");
            let element = ProductGroupElement::new(c.a.clone(), c.b.clone()).map_err(|e| CliError::field(&field, e))?;
            let map = MapDoc {
                matrix: c.matrix.clone(),
                offset: c.offset.clone(),
            }
            .to_map(&field)?;
            parsed.channels.push((element, map));
        }
        Ok(parsed)
    }

    pub fn from_parts(
        space: &StateSpace,
        observables: &[Observable],
        wigner: Option<(&str, &WignerRep)>,
        channels: &[SuppliedChannel],
    ) -> Self {
        let state_space = match space.shape() {
            Shape::Polytope { vertices } => StateSpaceDoc {
                kind: SpaceKind::Polytope,
                vertices: Some(vertices.iter().map(|v| exact_vec(v)).collect()),
                center: None,
                radius: None,
            },
            Shape::Ball { center, radius } => StateSpaceDoc {
                kind: SpaceKind::Ball,
                vertices: None,
                center: Some(exact_vec(center)),
                radius: Some(Exact(radius.clone())),
            },
        };
        let observables = observables
            .iter()
            .map(|o| ObservableDoc {
                name: o.name().to_string(),
                outcomes: o.outcomes().to_vec(),
                effects: o.effects().iter().map(FunctionalDoc::from).collect(),
            })
            .collect();
        let wigner = wigner.map(|(name, w)| WignerDoc {
            name: name.to_string(),
            a: Some(w.obs_a().name().to_string()),
            b: Some(w.obs_b().name().to_string()),
            grid: w
                .grid()
                .chunks(w.cols())
                .map(|row| row.iter().map(FunctionalDoc::from).collect())
                .collect(),
        });
        let channels = channels
            .iter()
            .map(|(g, m)| {
                let doc = MapDoc::from(m);
                ChannelDoc {
                    a: g.g1.clone(),
                    b: g.g2.clone(),
                    matrix: doc.matrix,
                    offset: doc.offset,
                }
            })
            .collect();
        TheoryFile {
            state_space,
            observables,
            wigner,
            channels,
        }
    }
}

/// Parses a functional such as `1/2*x0 - x1 + 1/4`. Coordinates are `x0`,
/// `x1`, ...; `x`, `y`, `z` name the first three.
pub fn parse_functional(text: &str, dim: usize) -> Result<AffineFunctional, CliError> {
    let bad = |msg: String| CliError::Usage(format!("cannot read functional {text:?}: {msg}"));
    let mut linear = vec![Rational::from_integer(0.into()); dim];
    let mut constant = Rational::from_integer(0.into());
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(bad("empty".into()));
    }
    // Split before every + or - that starts a term.
    let mut terms = Vec::new();
    let mut start = 0;
    for (i, c) in compact.char_indices() {
        if (c == '+' || c == '-') && i > 0 && !compact[..i].ends_with(['*', 'e', 'E']) {
            terms.push(&compact[start..i]);
            start = i;
        }
    }
    terms.push(&compact[start..]);
    for term in terms {
        let (sign, body) = match term.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, term.strip_prefix('+').unwrap_or(term)),
        };
        if body.is_empty() {
            return Err(bad("dangling sign".into()));
        }
        let (coef, var) = match body.split_once('*') {
            Some((c, v)) => (Some(c), Some(v)),
            None if body.starts_with(|c: char| c.is_ascii_alphabetic()) => (None, Some(body)),
            None => (Some(body), None),
        };
        let mut value = match coef {
            Some(c) => parse_rational(c).map_err(|e| bad(e.to_string()))?,
            None => Rational::from_integer(1.into()),
        };
        if sign < 0 {
            value = -value;
        }
        match var {
            None => constant += value,
            Some(v) => {
                let index = match v {
                    "x" => 0,
                    "y" => 1,
                    "z" => 2,
                    _ => v
                        .strip_prefix('x')
                        .and_then(|n| n.parse::<usize>().ok())
                        .ok_or_else(|| bad(format!("unknown variable {v}")))?,
                };
                if index >= dim {
                    return Err(bad(format!("variable {v} exceeds dimension {dim}")));
                }
                linear[index] += value;
            }
        }
    }
    Ok(AffineFunctional::new(linear, constant))
}
