use super::checks::compare_diffop;
use super::CheckResult;
use crate::diffop::{self, ad_powers, commutator, compose, poly_of_op, DiffOperator};
use crate::error::Result;
use crate::families::{Family, Kind};
use crate::ring::{Coeff, FormalPoly, Param, Rat};

struct Ops<'a, R: Coeff> {
    fam: &'a Family<R>,
}

impl<R: Coeff> Ops<'_, R> {
    fn at(&self, p: &FormalPoly) -> DiffOperator<R> {
        poly_of_op(p, &self.fam.b)
    }

    fn qd(&self, k: usize) -> FormalPoly {
        self.fam.spec.q.as_formal().nth_derivative(k)
    }

    fn prod(&self, factors: &[&DiffOperator<R>]) -> DiffOperator<R> {
        factors
            .iter()
            .fold(DiffOperator::identity(), |acc, f| compose(&acc, f))
    }

    fn constant(&self, c: R) -> DiffOperator<R> {
        DiffOperator::constant(c)
    }
}

fn claim_check<R: Coeff>(id: &str, text: &str, expected: &DiffOperator<R>, printed: &DiffOperator<R>) -> CheckResult {
    CheckResult::from_outcome(id, text, compare_diffop(expected, printed)).as_claim()
}

/// Audits the printed action of `σ = exp(ad q(B))` on the generators, term by
/// term where the closed form is organised by powers of `ad q(B)`, together
/// with the intermediate identities used to derive it.
pub fn check_sigma_closed_form<R: Coeff>(fam: &Family<R>) -> Result<Vec<CheckResult>> {
    let o = Ops { fam };
    let (x, h, b) = (&fam.x, &fam.h, &fam.b);
    let guard = diffop::default_ad_guard(&fam.q_op, x);
    let ad = ad_powers(&fam.q_op, x, guard, None)?;
    let ad_k = |k: usize| ad.get(k).cloned().unwrap_or_else(DiffOperator::zero);
    let mut sigma_x = DiffOperator::zero();
    for (k, t) in ad.iter().enumerate() {
        sigma_x = &sigma_x + &t.scale_rat(&Rat::factorial(k as u64).recip());
    }
    let sigma_h = fam.sigma(h, None)?;
    let sigma_b = fam.sigma(b, None)?;
    let (q1, q2, q3) = (o.at(&o.qd(1)), o.at(&o.qd(2)), o.at(&o.qd(3)));
    let q1sq = compose(&q1, &q1);
    let q1b = o.prod(&[&q1, b]);
    let mut out = Vec::new();

    match fam.spec.kind {
        Kind::Weyl => {
            out.push(claim_check("sigma-x", "sigma(x) = x + q'(d)", &sigma_x, &(x + &q1)));
            out.push(claim_check("sigma-d", "sigma(d) = d", &sigma_b, b));
            out.push(claim_check("sigma-h", "sigma(x d) = x d + q'(d) d", &sigma_h, &(h + &q1b)));
        }
        Kind::Sl2 => {
            let beta: R = fam.spec.param(Param::Beta)?;
            let two_h_beta = &h.scale(&R::from_i64(2)) + &o.constant(beta);
            let ad1 = &o.prod(&[&two_h_beta, &q1]) + &o.prod(&[&q2, b]);
            let ad2 = o.prod(&[&q1sq, b]).scale(&R::from_i64(2));
            let printed = &(&(x + &o.prod(&[&two_h_beta, &q1])) + &o.prod(&[&q2, b])) + &o.prod(&[&q1sq, b]);
            out.push(claim_check(
                "lem-4.2/sigma-x",
                "sigma(x) = x + (2H + beta)q'(B) + q''(B)B + q'(B)^2 B",
                &sigma_x,
                &printed,
            ));
            out.push(claim_check("lem-4.2/sigma-h", "sigma(H) = H + q'(B)B", &sigma_h, &(h + &q1b)));
            out.push(claim_check("lem-4.2/sigma-b", "sigma(B) = B", &sigma_b, b));
            out.push(claim_check(
                "lem-4.2/proof-ad1",
                "[q(B), x] = (2H + beta)q'(B) + q''(B)B",
                &ad_k(1),
                &ad1,
            ));
            out.push(claim_check("lem-4.2/proof-q-h", "[q(B), H] = q'(B)B", &commutator(&fam.q_op, h), &q1b));
            out.push(claim_check("lem-4.2/proof-ad2", "ad_q^2(x) = 2q'(B)^2 B", &ad_k(2), &ad2));
            out.push(claim_check("lem-4.2/proof-ad3", "ad_q^3(x) = 0", &ad_k(3), &DiffOperator::zero()));
        }
        Kind::Cubic => {
            let alpha: R = fam.spec.param(Param::Alpha)?;
            let beta: R = fam.spec.param(Param::Beta)?;
            let hh = compose(h, h);
            // W as printed: 3H² + 2αH + β; R = 3(2H + 1) + 2α
            let w = &(&hh.scale(&R::from_i64(3)) + &h.scale(&alpha.scale(&Rat::from(2)))) + &o.constant(beta);
            let r = &h.scale(&R::from_i64(6)) + &o.constant(alpha.scale(&Rat::from(2)).add_ref(&R::from_i64(3)));
            let r6 = &r + &o.constant(R::from_i64(6));
            let half = Rat::new(1, 2);

            let ad1 = &(&o.prod(&[&w, &q1]) + &o.prod(&[&r, &q2, b]).scale_rat(&half)) + &o.prod(&[&q3, b, b]);
            let brace_proof = &o.prod(&[&q2, b]).scale(&R::from_i64(6)) + &o.prod(&[&r6, &q1]);
            let ad2 = o.prod(&[&brace_proof, b, &q1]);
            let ad3 = o.prod(&[&q1sq, &q1, b, b]).scale(&R::from_i64(6));
            let term2 = o.prod(&[
                &(&o.prod(&[&q2, b]).scale(&R::from_i64(3)) + &o.prod(&[&r6, &q1]).scale_rat(&half)),
                b,
                &q1,
            ]);
            let term3 = o.prod(&[&q1sq, b, b, &q1]);
            let printed = &(&(&(x + &ad1) + &term2) + &term3);

            out.push(claim_check("lem-5.2/relation-w", "[B, x] = 3H^2 + 2 alpha H + beta", &commutator(b, x), &w));
            out.push(claim_check(
                "lem-5.2/proof-ad1",
                "[q(B), x] = W q'(B) + R q''(B)B/2 + q'''(B)B^2",
                &ad_k(1),
                &ad1,
            ));
            out.push(claim_check("lem-5.2/proof-q-h", "[q(B), H] = q'(B)B", &commutator(&fam.q_op, h), &q1b));
            out.push(claim_check(
                "lem-5.2/proof-ad2",
                "ad_q^2(x) = {6q''(B)B + (R + 6)q'(B)}B q'(B)",
                &ad_k(2),
                &ad2,
            ));
            out.push(claim_check("lem-5.2/proof-ad3", "ad_q^3(x) = 6q'(B)^3 B^2", &ad_k(3), &ad3));
            out.push(claim_check("lem-5.2/proof-ad4", "ad_q^4(x) = 0", &ad_k(4), &DiffOperator::zero()));
            out.push(claim_check(
                "lem-5.2/term-ad1",
                "first-order part of sigma(x): W q'(B) + R q''(B)B/2 + q'''(B)B^2",
                &ad_k(1),
                &ad1,
            ));
            out.push(claim_check(
                "lem-5.2/term-ad2",
                "second-order part of sigma(x): {3q''(B)B + (R + 6)q'(B)/2}B q'(B)",
                &ad_k(2).scale_rat(&half),
                &term2,
            ));
            out.push(claim_check(
                "lem-5.2/term-ad3",
                "third-order part of sigma(x): q'(B)^2 B B q'(B)",
                &ad_k(3).scale_rat(&Rat::new(1, 6)),
                &term3,
            ));
            out.push(claim_check(
                "lem-5.2/sigma-x",
                "sigma(x) = x + W q'(B) + R q''(B)B/2 + q'''(B)B^2 + {3q''(B)B + (R + 6)q'(B)/2 + q'(B)^2 B}B q'(B)",
                &sigma_x,
                &printed,
            ));
            out.push(claim_check("lem-5.2/sigma-h", "sigma(H) = H + q'(B)B", &sigma_h, &(h + &q1b)));
            out.push(claim_check("lem-5.2/sigma-b", "sigma(B) = B", &sigma_b, b));
        }
    }
    Ok(out)
}
