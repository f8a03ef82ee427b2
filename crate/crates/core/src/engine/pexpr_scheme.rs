use std::collections::BTreeMap;

use super::{Check, Scheme};
use crate::pexpr::{check_ground_property, entails_conditions, Bounds, PMorphism, PSpec, PSubstitution, PTerm, PexprError, Position, Verdict};

/// Program expressions with bounded, interpreter-based property checks.
#[derive(Debug, Clone)]
pub struct PexprScheme {
    pub bounds: Bounds,
    pub fuel: u64,
    /// Cap on the number of models assembled from a pool.
    pub max_models: usize,
}

impl Default for PexprScheme {
    fn default() -> Self {
        PexprScheme { bounds: Bounds::default(), fuel: 10_000, max_models: 4096 }
    }
}

impl Scheme for PexprScheme {
    type Orc = PTerm;
    type Spec = PSpec;
    type Morphism = PMorphism;
    type Hint = ();
    /// Ground programs to plug into program variables.
    type Pool = Vec<PTerm>;
    type Error = PexprError;

    fn bounded(&self) -> bool {
        true
    }

    fn orc_label(&self, o: &PTerm) -> String {
        o.to_string()
    }

    fn spec_key(&self, s: &PSpec) -> String {
        s.position.to_string()
    }

    fn identity(&self, o: &PTerm) -> PMorphism {
        PMorphism::identity(o.clone())
    }

    fn compose(&self, f: &PMorphism, g: &PMorphism) -> Result<PMorphism, PexprError> {
        f.then(g)
    }

    fn target(&self, m: &PMorphism) -> PTerm {
        m.target.clone()
    }

    fn translate(&self, m: &PMorphism, s: &PSpec) -> Result<PSpec, PexprError> {
        m.translate(s)
    }

    fn is_ground(&self, o: &PTerm) -> bool {
        o.is_ground()
    }

    fn is_property(&self, o: &PTerm, s: &PSpec) -> Result<Check, PexprError> {
        Ok(match check_ground_property(o, s, &self.bounds, self.fuel)? {
            Verdict::Holds => Check::Holds,
            Verdict::Fails(_) => Check::Fails,
            Verdict::Inconclusive => Check::Unknown,
        })
    }

    /// Only specs of a `skip` whose pre-condition entails its post-condition.
    fn is_trivial(&self, o: &PTerm, s: &PSpec) -> Result<bool, PexprError> {
        Ok(*o.subterm_at(&s.position)? == PTerm::Skip && entails_conditions(&s.pre, &s.post, &self.bounds)?)
    }

    fn spec_entails(&self, _: &PTerm, strong: &PSpec, weak: &PSpec) -> Result<bool, PexprError> {
        Ok(strong.position == weak.position
            && entails_conditions(&weak.pre, &strong.pre, &self.bounds)?
            && entails_conditions(&strong.post, &weak.post, &self.bounds)?)
    }

    /// Plugs the renamed clause program into the program variable at the
    /// selected position: `⟨{p ↦ c′}, ε⟩ : q → q[c′/p]` and
    /// `⟨fresh, ι⟩ : c → q[c′/p]`.
    fn bind(&self, q: &PTerm, qs: &PSpec, c: &PTerm, _cs: &PSpec, _hint: Option<&()>, fresh: usize) -> Result<Vec<(PMorphism, PMorphism)>, PexprError> {
        let PTerm::PVar(p) = q.subterm_at(&qs.position)? else {
            return Ok(Vec::new());
        };
        let (renamed, freshen) = c.freshen(&format!("_{fresh}"));
        let psi = PSubstitution::single(p.clone(), renamed);
        let apex = q.apply(&psi);
        let theta1 = PMorphism::new(psi, Position::root(), q.clone(), apex.clone())?;
        let theta2 = PMorphism::new(freshen, qs.position.clone(), c.clone(), apex)?;
        Ok(vec![(theta1, theta2)])
    }

    /// Every assignment of pool programs to the program variables of `o`, up
    /// to `max_models`.
    fn models(&self, o: &PTerm, pool: &Vec<PTerm>) -> Result<Vec<PMorphism>, PexprError> {
        let vars: Vec<String> = o.pvars().into_iter().collect();
        let ground: Vec<&PTerm> = pool.iter().filter(|t| t.is_ground()).collect();
        if !vars.is_empty() && ground.is_empty() {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        let mut choice = vec![0usize; vars.len()];
        loop {
            let psi = PSubstitution(vars.iter().zip(&choice).map(|(p, &i)| (p.clone(), ground[i].clone())).collect::<BTreeMap<_, _>>());
            out.push(PMorphism::new(psi.clone(), Position::root(), o.clone(), o.apply(&psi))?);
            if out.len() >= self.max_models {
                return Ok(out);
            }
            let Some(i) = (0..choice.len()).rev().find(|&i| choice[i] + 1 < ground.len()) else {
                return Ok(out);
            };
            choice[i] += 1;
            for c in &mut choice[i + 1..] {
                *c = 0;
            }
        }
    }
}
