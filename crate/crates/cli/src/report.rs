//! Report documents. Every claim carries the witness or certificate that
//! `verify` replays, or names the engine operation it re-runs.

use serde::{Deserialize, Serialize};

use wignerlab_core::exact::{FarkasCertificate, Rational};
use wignerlab_core::geometry::{AffineMap, StateSpace};
use wignerlab_core::symmetry::{PhasePointMap, ProductGroupElement};
use wignerlab_core::wigner::WignerRep;

use crate::format::{exact_vec, rational_vec, ChannelDoc, Exact, FunctionalDoc, MapDoc, WignerDoc};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDoc {
    pub equality_multipliers: Vec<Exact>,
    pub inequality_multipliers: Vec<Exact>,
}

impl From<&FarkasCertificate> for CertificateDoc {
    fn from(c: &FarkasCertificate) -> Self {
        Self {
            equality_multipliers: exact_vec(&c.equality_multipliers),
            inequality_multipliers: exact_vec(&c.inequality_multipliers),
        }
    }
}

impl CertificateDoc {
    pub fn to_certificate(&self) -> FarkasCertificate {
        FarkasCertificate {
            equality_multipliers: rational_vec(&self.equality_multipliers),
            inequality_multipliers: rational_vec(&self.inequality_multipliers),
        }
    }
}

/// A state; on polytopes also convex weights over the vertices that
/// certify membership.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDoc {
    pub point: Vec<Exact>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub weights: Vec<Exact>,
}

impl StateDoc {
    /// Attaches hull weights when `space` is a polytope.
    pub fn new(space: &StateSpace, point: &[Rational]) -> Self {
        let weights = match space.vertices() {
            Some(vertices) => wignerlab_core::geometry::hull_membership(vertices, point)
                .witness()
                .map(exact_vec)
                .unwrap_or_default(),
            None => Vec::new(),
        };
        Self {
            point: exact_vec(point),
            weights,
        }
    }
}

pub fn rep_doc(name: &str, w: &WignerRep) -> WignerDoc {
    WignerDoc {
        name: name.to_string(),
        a: Some(w.obs_a().name().to_string()),
        b: Some(w.obs_b().name().to_string()),
        grid: w
            .grid()
            .chunks(w.cols())
            .map(|row| row.iter().map(FunctionalDoc::from).collect())
            .collect(),
    }
}

pub fn channel_doc(g: &ProductGroupElement, map: &AffineMap) -> ChannelDoc {
    let doc = MapDoc::from(map);
    ChannelDoc {
        a: g.g1.clone(),
        b: g.g2.clone(),
        matrix: doc.matrix,
        offset: doc.offset,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseMapDoc {
    pub table: Vec<usize>,
    pub label: String,
}

impl From<&PhasePointMap> for PhaseMapDoc {
    fn from(m: &PhasePointMap) -> Self {
        Self {
            table: m.table().to_vec(),
            label: m.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "claim", rename_all = "snake_case", deny_unknown_fields)]
pub enum Claim {
    Valid,
    Invalid {
        violations: Vec<String>,
    },
    /// Joint effects, row-major over `a × b`.
    Compatible {
        a: String,
        b: String,
        joint: Vec<FunctionalDoc>,
    },
    Incompatible {
        a: String,
        b: String,
        certificate: CertificateDoc,
    },
    InfoComplete {
        a: String,
        b: String,
        holds: bool,
        rank: usize,
        dimension: usize,
    },
    Complementary {
        a: String,
        b: String,
    },
    /// At `state`, outcome `outcome` of `certain` is certain while the
    /// other observable is not uniform.
    NotComplementary {
        a: String,
        b: String,
        certain: String,
        outcome: usize,
        state: Option<StateDoc>,
        other_values: Vec<String>,
    },
    Surjective {
        observable: String,
        holds: bool,
        witnesses: Vec<Option<StateDoc>>,
    },
    FaithfulChoice {
        a: String,
        b: String,
        free_slots: usize,
        required: usize,
        possible: bool,
    },
    Faithful {
        rep: WignerDoc,
        holds: bool,
        rank: usize,
    },
    Positive {
        rep: WignerDoc,
    },
    Negative {
        rep: WignerDoc,
        row: usize,
        col: usize,
        minimum: String,
        state: Option<StateDoc>,
        value: Option<Exact>,
    },
    NoPositiveMember {
        a: String,
        b: String,
        certificate: CertificateDoc,
    },
    LiftedSymmetries {
        rep: WignerDoc,
        maps: Vec<PhaseMapDoc>,
    },
    SymmetryViolated {
        rep: WignerDoc,
        map: PhaseMapDoc,
        state: StateDoc,
        image: Vec<Exact>,
        certificate: Option<CertificateDoc>,
    },
    Transported {
        rep: WignerDoc,
        map: PhaseMapDoc,
        channel: MapDoc,
    },
    NotTransported {
        rep: WignerDoc,
        map: PhaseMapDoc,
        certificate: CertificateDoc,
    },
    /// `W(first) = W(second)` while `W(Φ first) ≠ W(Φ second)`.
    NoTransportedSymmetry {
        rep: WignerDoc,
        channel: MapDoc,
        first: Vec<Exact>,
        second: Vec<Exact>,
    },
    GridMap {
        rep: WignerDoc,
        channel: MapDoc,
        grid_map: MapDoc,
    },
    Hypotheses {
        a: String,
        b: String,
        jointly_info_complete: bool,
        complementary: Option<bool>,
        surjective_a: bool,
        surjective_b: bool,
    },
    CovariantUnique {
        rep: WignerDoc,
        channels: Vec<ChannelDoc>,
        symmetric: bool,
    },
    CovariantFamily {
        base: WignerDoc,
        directions: Vec<Vec<FunctionalDoc>>,
    },
    /// The outcome permutation `(element_a, element_b)` has no channel.
    CovariantNoChannel {
        a: String,
        b: String,
        element_a: Vec<usize>,
        element_b: Vec<usize>,
        certificate: CertificateDoc,
        witness: Option<(Vec<Exact>, Vec<Exact>)>,
    },
    /// The covariance equations for the listed generator channels are
    /// inconsistent.
    CovariantInconsistent {
        a: String,
        b: String,
        channels: Vec<ChannelDoc>,
        certificate: CertificateDoc,
    },
    HypothesisFailure {
        a: String,
        b: String,
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    pub command: String,
    pub claims: Vec<Claim>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn show(values: &[Exact]) -> String {
    let parts: Vec<String> = values.iter().map(|v| v.0.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn show_grid(rep: &WignerDoc) -> String {
    rep.grid
        .iter()
        .map(|row| {
            let cells: Vec<String> = row
                .iter()
                .map(|f| wignerlab_core::geometry::AffineFunctional::from(f).to_string())
                .collect();
            format!("  [{}]", cells.join(" | "))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

impl Claim {
    /// One human-readable paragraph.
    pub fn describe(&self) -> String {
        match self {
            Claim::Valid => "theory is valid".into(),
            Claim::Invalid { violations } => format!("theory is invalid:\n  {}", violations.join("\n  ")),
            Claim::Compatible { a, b, .. } => format!("{a} and {b} are compatible (joint observable found)"),
            Claim::Incompatible { a, b, .. } => format!("{a} and {b} are incompatible (Farkas certificate attached)"),
            Claim::InfoComplete { a, b, holds, rank, dimension } => format!(
                "{a} and {b} are {}jointly info-complete (effect span rank {rank}, needed {})",
                if *holds { "" } else { "not " },
                dimension + 1
            ),
            Claim::Complementary { a, b } => format!("{a} and {b} are complementary"),
            Claim::NotComplementary { a, b, certain, outcome, state, other_values } => format!(
                "{a} and {b} are not complementary: outcome {outcome} of {certain} is certain at {} where the other observable gives [{}]",
                state.as_ref().map_or("an irrational state".into(), |s| show(&s.point)),
                other_values.join(", ")
            ),
            Claim::Surjective { observable, holds, .. } => {
                format!("{observable} is {}surjective", if *holds { "" } else { "not " })
            }
            Claim::FaithfulChoice { free_slots, required, possible, .. } => format!(
                "faithful choice: {free_slots} free slots >= {required} required is {possible}"
            ),
            Claim::Faithful { rep, holds, rank } => format!(
                "{} is {}faithful (rank {rank})\n{}",
                rep.name,
                if *holds { "" } else { "not " },
                show_grid(rep)
            ),
            Claim::Positive { rep } => format!("{} is positive", rep.name),
            Claim::Negative { rep, row, col, minimum, state, value } => format!(
                "{} is not positive: entry ({row}, {col}) has minimum {minimum}{}",
                rep.name,
                match (state, value) {
                    (Some(s), Some(v)) => format!(", value {} at {}", v.0, show(&s.point)),
                    _ => String::new(),
                }
            ),
            Claim::NoPositiveMember { a, b, .. } => {
                format!("no positive Wigner representation of {a} and {b} exists (Farkas certificate attached)")
            }
            Claim::LiftedSymmetries { rep, maps } => format!(
                "lifted symmetries of {}: {}",
                rep.name,
                maps.iter().map(|m| m.label.clone()).collect::<Vec<_>>().join(", ")
            ),
            Claim::SymmetryViolated { rep, map, state, image, .. } => format!(
                "{} is not a symmetry of {}: the state {} is sent to {} outside the image",
                map.label,
                rep.name,
                show(&state.point),
                show(image)
            ),
            Claim::Transported { rep, map, channel } => format!(
                "{} on {} is transported by the channel {}",
                map.label,
                rep.name,
                MapDoc::to_map(channel, "channel").map_or("?".into(), |m| m.to_string())
            ),
            Claim::NotTransported { rep, map, .. } => {
                format!("{} on {} is not transported by any channel", map.label, rep.name)
            }
            Claim::NoTransportedSymmetry { rep, first, second, .. } => format!(
                "no transported symmetry on {}: {} and {} have equal images but their channel images differ",
                rep.name,
                show(first),
                show(second)
            ),
            Claim::GridMap { rep, grid_map, .. } => format!(
                "the channel is transported on {} by the grid map {}",
                rep.name,
                MapDoc::to_map(grid_map, "grid_map").map_or("?".into(), |m| m.to_string())
            ),
            Claim::Hypotheses { a, b, jointly_info_complete, complementary, surjective_a, surjective_b } => format!(
                "hypotheses for {a}, {b}: jointly info-complete {jointly_info_complete}, complementary {}, surjective {surjective_a}/{surjective_b}",
                complementary.map_or("undecided".into(), |c| c.to_string())
            ),
            Claim::CovariantUnique { rep, symmetric, .. } => format!(
                "unique covariant representation{}\n{}",
                if *symmetric { "" } else { " (symmetry post-check failed)" },
                show_grid(rep)
            ),
            Claim::CovariantFamily { base, directions } => format!(
                "covariant representations form a {}-parameter family; base\n{}",
                directions.len(),
                show_grid(base)
            ),
            Claim::CovariantNoChannel { element_a, element_b, witness, .. } => format!(
                "no covariant representation: the outcome permutation ({element_a:?}, {element_b:?}) has no channel{}",
                witness
                    .as_ref()
                    .map_or(String::new(), |(p, i)| format!("; the forced map sends {} to {}", show(p), show(i)))
            ),
            Claim::CovariantInconsistent { .. } => {
                "no covariant representation: the covariance equations are inconsistent".into()
            }
            Claim::HypothesisFailure { reason, .. } => format!("covariant solver declined: {reason}"),
        }
    }
}

impl ReportDocument {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            claims: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.claims {
            out.push_str(&c.describe());
            out.push('\n');
        }
        for n in &self.notes {
            out.push_str("note: ");
            out.push_str(n);
            out.push('\n');
        }
        out
    }
}
