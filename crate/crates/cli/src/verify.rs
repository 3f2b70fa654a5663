//! Replays the claims of a report. Certificates and witnesses are checked
//! by exact arithmetic against programs rebuilt from the theory file;
//! claims without a certificate are recomputed with the engine.

use std::fmt;

use num_traits::{One, Signed};

use wignerlab_core::exact::{combination, norm_squared, sub, LinearProgram, Rational};
use wignerlab_core::geometry::{hull_membership_program, AffineFunctional, Shape, StateSpace};
use wignerlab_core::symmetry::{
    covariance_system, enumerate_lifted_symmetries, permutation_equations, transport_equations, Hypotheses,
    PhasePointMap, ProductGroupElement,
};
use wignerlab_core::theory::{
    are_complementary, channel_program, compatibility_program, effect_span_rank, jointly_info_complete, validate,
    verify_channel, Channel,
};
use wignerlab_core::wigner::{faithful_choice_possible, positive_member_program, Anchor, WignerRep};

use crate::error::CliError;
use crate::format::{rational_vec, ChannelDoc, Exact, MapDoc, Parsed, WignerDoc};
use crate::report::{CertificateDoc, Claim, StateDoc};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    /// Witness or certificate checked by arithmetic alone.
    Checked,
    /// No certificate; the engine was re-run and agrees.
    Recomputed,
    Failed(String),
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Checked => write!(f, "checked"),
            Status::Recomputed => write!(f, "recomputed"),
            Status::Failed(why) => write!(f, "FAILED ({why})"),
        }
    }
}

fn require(ok: bool, why: &str) -> Result<(), Status> {
    if ok {
        Ok(())
    } else {
        Err(Status::Failed(why.to_string()))
    }
}

fn engine<T>(r: Result<T, impl fmt::Display>) -> Result<T, Status> {
    r.map_err(|e| Status::Failed(e.to_string()))
}

fn certificate_holds(doc: &CertificateDoc, lp: &LinearProgram) -> Result<(), Status> {
    doc.to_certificate()
        .check(lp)
        .map(|_| ())
        .map_err(|e| Status::Failed(format!("certificate does not verify: {e}")))
}

/// Membership of a state: convex weights on polytopes, the norm on balls.
fn state_in_space(space: &StateSpace, state: &StateDoc) -> Result<(), Status> {
    let point = rational_vec(&state.point);
    match space.shape() {
        Shape::Polytope { vertices } => {
            let weights = rational_vec(&state.weights);
            require(weights.len() == vertices.len(), "membership weights missing")?;
            require(weights.iter().all(|w| !w.is_negative()), "negative membership weight")?;
            require(weights.iter().sum::<Rational>().is_one(), "membership weights do not sum to one")?;
            let combined = combination(&weights, vertices, space.ambient_dim());
            require(combined == point, "weights do not reproduce the state")
        }
        Shape::Ball { center, radius } => {
            require(point.len() == center.len(), "state has the wrong dimension")?;
            require(norm_squared(&sub(&point, center)) <= radius * radius, "state lies outside the ball")
        }
    }
}

fn same_on(space: &StateSpace, f: &AffineFunctional, g: &AffineFunctional) -> bool {
    space.frame().vanishes(&(f - g))
}

fn phase_map(rep: &WignerRep, table: &[usize]) -> Result<PhasePointMap, Status> {
    engine(PhasePointMap::new(rep.rows(), rep.cols(), table.to_vec()))
}

fn channels(parsed: &Parsed, docs: &[ChannelDoc]) -> Result<Vec<(ProductGroupElement, Channel)>, Status> {
    docs.iter()
        .map(|c| {
            let element = engine(ProductGroupElement::new(c.a.clone(), c.b.clone()))?;
            let map = engine(
                MapDoc {
                    matrix: c.matrix.clone(),
                    offset: c.offset.clone(),
                }
                .to_map("channel"),
            )?;
            Ok((element, engine(Channel::new(&parsed.space, map, &parsed.space))?))
        })
        .collect()
}

fn vector(values: &[Exact]) -> Vec<Rational> {
    rational_vec(values)
}

/// Checks one claim against the theory.
pub fn verify_claim(parsed: &Parsed, claim: &Claim) -> Status {
    match check(parsed, claim) {
        Ok(s) | Err(s) => s,
    }
}

fn rep(parsed: &Parsed, doc: &WignerDoc) -> Result<WignerRep, Status> {
    parsed.build_rep(doc, "rep").map_err(|e: CliError| Status::Failed(e.to_string()))
}

fn check(parsed: &Parsed, claim: &Claim) -> Result<Status, Status> {
    let space = &parsed.space;
    let obs = |name: &str| engine(parsed.observable(Some(name), 0));
    match claim {
        Claim::Valid => {
            require(validate(space, &parsed.observables).is_empty(), "the theory has violations")?;
            Ok(Status::Recomputed)
        }
        Claim::Invalid { .. } => {
            require(!validate(space, &parsed.observables).is_empty(), "the theory is valid")?;
            Ok(Status::Recomputed)
        }
        Claim::Compatible { a, b, joint } => {
            let (a, b) = (obs(a)?, obs(b)?);
            require(joint.len() == a.len() * b.len(), "wrong number of joint effects")?;
            let joint: Vec<AffineFunctional> = joint.iter().map(AffineFunctional::from).collect();
            let dim = space.ambient_dim();
            for x in 0..a.len() {
                let sum = AffineFunctional::sum(dim, joint[x * b.len()..(x + 1) * b.len()].iter());
                require(same_on(space, &sum, a.effect(x)), "row marginal differs")?;
            }
            for y in 0..b.len() {
                let sum = AffineFunctional::sum(dim, (0..a.len()).map(|x| &joint[x * b.len() + y]));
                require(same_on(space, &sum, b.effect(y)), "column marginal differs")?;
            }
            let vertices = engine(space.require_vertices("compatibility"))?;
            for v in vertices {
                require(joint.iter().all(|j| !j.eval(v).is_negative()), "joint effect negative at a vertex")?;
            }
            Ok(Status::Checked)
        }
        Claim::Incompatible { a, b, certificate } => {
            let lp = engine(compatibility_program(obs(a)?, obs(b)?, space))?;
            certificate_holds(certificate, &lp)?;
            Ok(Status::Checked)
        }
        Claim::InfoComplete { a, b, holds, rank, dimension } => {
            let r = effect_span_rank(obs(a)?, obs(b)?, space);
            require(r == *rank && *dimension == space.dimension(), "rank differs")?;
            require(*holds == (r == space.dimension() + 1), "verdict does not follow from the rank")?;
            Ok(Status::Checked)
        }
        Claim::Complementary { a, b } => {
            require(engine(are_complementary(obs(a)?, obs(b)?, space))?.is_none(), "not complementary")?;
            Ok(Status::Recomputed)
        }
        Claim::NotComplementary { a, b, certain, outcome, state, .. } => {
            let (first, second) = if certain == a { (obs(a)?, obs(b)?) } else { (obs(b)?, obs(a)?) };
            let Some(state) = state else {
                require(engine(are_complementary(obs(a)?, obs(b)?, space))?.is_some(), "complementary")?;
                return Ok(Status::Recomputed);
            };
            state_in_space(space, state)?;
            let x = vector(&state.point);
            require(*outcome < first.len() && first.effect(*outcome).eval(&x).is_one(), "outcome is not certain")?;
            require(!second.distribution_at(&x).is_uniform(), "the other observable is uniform")?;
            Ok(Status::Checked)
        }
        Claim::Surjective { observable, holds, witnesses } => {
            let o = obs(observable)?;
            if !*holds {
                let s = engine(wignerlab_core::theory::is_surjective(o, space))?;
                require(!s.is_surjective(), "the observable is surjective")?;
                return Ok(Status::Recomputed);
            }
            require(witnesses.len() == o.len(), "one witness per outcome expected")?;
            for (i, w) in witnesses.iter().enumerate() {
                let Some(w) = w else {
                    let s = engine(wignerlab_core::theory::is_surjective(o, space))?;
                    require(s.is_surjective(), "not surjective")?;
                    return Ok(Status::Recomputed);
                };
                state_in_space(space, w)?;
                require(o.effect(i).eval(&vector(&w.point)).is_one(), "outcome not certain at its witness")?;
            }
            Ok(Status::Checked)
        }
        Claim::FaithfulChoice { a, b, free_slots, required, possible } => {
            let c = faithful_choice_possible(obs(a)?, obs(b)?, space);
            require(
                c.free_slots == *free_slots && c.required == *required && c.possible == *possible,
                "counting condition differs",
            )?;
            Ok(Status::Checked)
        }
        Claim::Faithful { rep: doc, holds, rank } => {
            let w = rep(parsed, doc)?;
            let r = w.representation_rank(space);
            require(r == *rank && (r == space.dimension() + 1) == *holds, "rank differs")?;
            Ok(Status::Checked)
        }
        Claim::Positive { rep: doc } => {
            let w = rep(parsed, doc)?;
            match space.vertices() {
                Some(vertices) => {
                    for v in vertices {
                        require(w.evaluate_unchecked(v).is_nonnegative(), "negative entry at a vertex")?;
                    }
                    Ok(Status::Checked)
                }
                None => {
                    require(engine(w.is_positive(space))?.is_positive(), "not positive")?;
                    Ok(Status::Recomputed)
                }
            }
        }
        Claim::Negative { rep: doc, row, col, state, value, .. } => {
            let w = rep(parsed, doc)?;
            require(*row < w.rows() && *col < w.cols(), "cell out of range")?;
            match (state, value) {
                (Some(state), Some(value)) => {
                    state_in_space(space, state)?;
                    let got = w.entry(*row, *col).eval(&vector(&state.point));
                    require(got == value.0 && got.is_negative(), "entry is not the stated negative value")?;
                    Ok(Status::Checked)
                }
                _ => {
                    require(!engine(w.is_positive(space))?.is_positive(), "positive")?;
                    Ok(Status::Recomputed)
                }
            }
        }
        Claim::NoPositiveMember { a, b, certificate } => {
            let (a, b) = (obs(a)?, obs(b)?);
            let lp = engine(positive_member_program(a, b, space, Anchor::last(a, b)))?;
            certificate_holds(certificate, &lp)?;
            Ok(Status::Checked)
        }
        Claim::LiftedSymmetries { rep: doc, maps } => {
            let w = rep(parsed, doc)?;
            let got = engine(enumerate_lifted_symmetries(&w, space))?;
            let tables: Vec<Vec<usize>> = got.iter().map(|m| m.table().to_vec()).collect();
            let claimed: Vec<Vec<usize>> = maps.iter().map(|m| m.table.clone()).collect();
            require(tables == claimed, "symmetry list differs")?;
            Ok(Status::Recomputed)
        }
        Claim::SymmetryViolated { rep: doc, map, state, image, certificate } => {
            let w = rep(parsed, doc)?;
            let phi = phase_map(&w, &map.table)?;
            state_in_space(space, state)?;
            let moved = phi.lift().apply(&w.evaluate_unchecked(&vector(&state.point)));
            require(moved.entries() == vector(image).as_slice(), "image differs")?;
            match (space.vertices(), certificate) {
                (Some(vertices), Some(cert)) => {
                    let lp = hull_membership_program(&w.images(vertices), &vector(image));
                    certificate_holds(cert, &lp)?;
                    Ok(Status::Checked)
                }
                _ => {
                    let check = engine(wignerlab_core::symmetry::is_lifted_symmetry(&w, space, &phi))?;
                    require(!check.holds(), "the map is a symmetry")?;
                    Ok(Status::Recomputed)
                }
            }
        }
        Claim::Transported { rep: doc, map, channel } => {
            let w = rep(parsed, doc)?;
            let lift = phase_map(&w, &map.table)?.lift().to_affine_map();
            let channel = engine(channel.to_map("channel"))?;
            engine(verify_channel(space, space, channel, &transport_equations(&w, &lift)))?;
            Ok(Status::Recomputed)
        }
        Claim::NotTransported { rep: doc, map, certificate } => {
            let w = rep(parsed, doc)?;
            let lift = phase_map(&w, &map.table)?.lift().to_affine_map();
            let lp = engine(channel_program(space, space, &transport_equations(&w, &lift)))?;
            certificate_holds(certificate, &lp)?;
            Ok(Status::Checked)
        }
        Claim::NoTransportedSymmetry { rep: doc, channel, first, second } => {
            let w = rep(parsed, doc)?;
            let channel = engine(channel.to_map("channel"))?;
            let (x, y) = (vector(first), vector(second));
            require(w.evaluate_unchecked(&x) == w.evaluate_unchecked(&y), "the two states have different images")?;
            require(
                w.evaluate_unchecked(&channel.apply(&x)) != w.evaluate_unchecked(&channel.apply(&y)),
                "the channel images coincide",
            )?;
            Ok(Status::Checked)
        }
        Claim::GridMap { rep: doc, channel, grid_map } => {
            let w = rep(parsed, doc)?;
            let channel = engine(channel.to_map("channel"))?;
            let psi = engine(grid_map.to_map("grid_map"))?;
            for p in space.frame().points() {
                let lhs = psi.apply(w.evaluate_unchecked(p).entries());
                let rhs = w.evaluate_unchecked(&channel.apply(p)).into_entries();
                require(lhs == rhs, "the diagram does not commute")?;
            }
            Ok(Status::Checked)
        }
        Claim::Hypotheses { a, b, jointly_info_complete, complementary, surjective_a, surjective_b } => {
            let h = engine(Hypotheses::evaluate(obs(a)?, obs(b)?, space))?;
            require(
                h.jointly_info_complete == *jointly_info_complete
                    && h.complementary == *complementary
                    && h.surjective_a == *surjective_a
                    && h.surjective_b == *surjective_b,
                "hypotheses differ",
            )?;
            Ok(Status::Recomputed)
        }
        Claim::CovariantUnique { rep: doc, channels: docs, .. } => {
            let w = rep(parsed, doc)?;
            let chans = channels(parsed, docs)?;
            for (g, phi) in &chans {
                for (lhs, rhs) in permutation_equations(w.obs_a(), w.obs_b(), g) {
                    require(same_on(space, &lhs.compose(phi.map()), &rhs), "channel misses its effect equations")?;
                }
                let source = g.inverse().phase_map();
                for cell in 0..w.rows() * w.cols() {
                    let moved = w.grid()[cell].compose(phi.map());
                    require(same_on(space, &moved, &w.grid()[source.apply(cell)]), "grid is not covariant")?;
                }
            }
            Ok(Status::Recomputed)
        }
        Claim::CovariantFamily { base, directions } => {
            let w = rep(parsed, base)?;
            let report = engine(wignerlab_core::symmetry::solve_covariant(w.obs_a(), w.obs_b(), space, &parsed.channels))?;
            match report.outcome {
                wignerlab_core::symmetry::CovariantOutcome::Family { directions: d, .. } => {
                    require(d.len() == directions.len(), "family dimension differs")?;
                    Ok(Status::Recomputed)
                }
                _ => Err(Status::Failed("not a family".into())),
            }
        }
        Claim::CovariantNoChannel { a, b, element_a, element_b, certificate, .. } => {
            let g = engine(ProductGroupElement::new(element_a.clone(), element_b.clone()))?;
            let lp = engine(channel_program(space, space, &permutation_equations(obs(a)?, obs(b)?, &g)))?;
            certificate_holds(certificate, &lp)?;
            Ok(Status::Checked)
        }
        Claim::CovariantInconsistent { a, b, channels: docs, certificate } => {
            let chans = channels(parsed, docs)?;
            for (g, phi) in &chans {
                for (lhs, rhs) in permutation_equations(obs(a)?, obs(b)?, g) {
                    require(same_on(space, &lhs.compose(phi.map()), &rhs), "channel misses its effect equations")?;
                }
            }
            let (matrix, rhs) = covariance_system(obs(a)?, obs(b)?, space, &chans);
            let mut lp = LinearProgram::new(matrix.cols());
            for (i, r) in rhs.iter().enumerate() {
                lp.add_equality(matrix.row(i).to_vec(), r.clone());
            }
            certificate_holds(certificate, &lp)?;
            Ok(Status::Checked)
        }
        Claim::HypothesisFailure { a, b, .. } => {
            require(!jointly_info_complete(obs(a)?, obs(b)?, space), "the pair is jointly info-complete")?;
            Ok(Status::Recomputed)
        }
    }
}
