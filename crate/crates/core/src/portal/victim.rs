//! Simulated victims: how a person at the captive portal behaves.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::medium::Tick;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Engagement {
    VeryActive,
    MildActive,
    NotActive,
}

/// Uniform delay between seeing a prompt and submitting, inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThinkTime {
    pub min_ticks: Tick,
    pub max_ticks: Tick,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VictimProfile {
    pub engagement: Engagement,
    pub submit_probability_per_prompt: f64,
    pub typo_probability: f64,
    pub think_time: ThinkTime,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProfileError {
    #[error("{0} must lie in [0, 1]")]
    Probability(&'static str),
    #[error("think time minimum exceeds maximum")]
    ThinkTime,
    #[error("a NotActive victim cannot have a non-zero submit probability")]
    InactiveSubmits,
}

impl VictimProfile {
    /// Default parameters per engagement level.
    pub fn for_engagement(engagement: Engagement) -> Self {
        let (p, typo, min, max) = match engagement {
            Engagement::VeryActive => (1.0, 0.0, 3_000, 10_000),
            Engagement::MildActive => (0.5, 0.1, 10_000, 40_000),
            Engagement::NotActive => (0.0, 0.0, 0, 0),
        };
        Self {
            engagement,
            submit_probability_per_prompt: p,
            typo_probability: typo,
            think_time: ThinkTime { min_ticks: min, max_ticks: max },
        }
    }

    pub fn validate(&self) -> Result<(), ProfileError> {
        let unit = 0.0..=1.0;
        if !unit.contains(&self.submit_probability_per_prompt) {
            return Err(ProfileError::Probability("submit_probability_per_prompt"));
        }
        if !unit.contains(&self.typo_probability) {
            return Err(ProfileError::Probability("typo_probability"));
        }
        if self.think_time.min_ticks > self.think_time.max_ticks {
            return Err(ProfileError::ThinkTime);
        }
        if self.engagement == Engagement::NotActive && self.submit_probability_per_prompt != 0.0 {
            return Err(ProfileError::InactiveSubmits);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VictimAction {
    Submit(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Prompt {
    None,
    Shown { at: Tick },
    Typing { due: Tick },
}

/// What one victim knows and is currently doing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VictimState {
    passphrase: String,
    prompt: Prompt,
    submissions: u32,
}

impl VictimState {
    pub fn new(passphrase: impl Into<String>) -> Self {
        Self { passphrase: passphrase.into(), prompt: Prompt::None, submissions: 0 }
    }

    /// The portal page (first or retry) is in front of the victim.
    pub fn show_prompt(&mut self, now: Tick) {
        if self.prompt == Prompt::None {
            self.prompt = Prompt::Shown { at: now };
        }
    }

    /// Victim left the portal, e.g. the rogue went away.
    pub fn dismiss(&mut self) {
        self.prompt = Prompt::None;
    }

    pub fn submissions(&self) -> u32 {
        self.submissions
    }

    pub fn next_wakeup(&self) -> Option<Tick> {
        match self.prompt {
            Prompt::None => None,
            Prompt::Shown { at } => Some(at),
            Prompt::Typing { due } => Some(due),
        }
    }
}

/// Advances the victim to `now`. Each prompt is decided once: the victim
/// either starts typing after a think time or ignores it.
pub fn step_victim<R: Rng + ?Sized>(
    profile: &VictimProfile,
    state: &mut VictimState,
    rng: &mut R,
    now: Tick,
) -> Option<VictimAction> {
    if let Prompt::Shown { at } = state.prompt {
        if now < at {
            return None;
        }
        if profile.submit_probability_per_prompt > 0.0 && rng.gen_bool(profile.submit_probability_per_prompt) {
            let ThinkTime { min_ticks, max_ticks } = profile.think_time;
            state.prompt = Prompt::Typing { due: at + rng.gen_range(min_ticks..=max_ticks) };
        } else {
            state.prompt = Prompt::None;
            return None;
        }
    }
    match state.prompt {
        Prompt::Typing { due } if now >= due => {
            state.prompt = Prompt::None;
            state.submissions += 1;
            let typo = profile.typo_probability > 0.0 && rng.gen_bool(profile.typo_probability);
            let text = if typo { corrupt(&state.passphrase, rng) } else { state.passphrase.clone() };
            Some(VictimAction::Submit(text))
        }
        _ => None,
    }
}

/// Replaces one character with a different printable ASCII one.
fn corrupt<R: Rng + ?Sized>(text: &str, rng: &mut R) -> String {
    let mut chars: Vec<char> = text.chars().collect();
    if chars.is_empty() {
        return "x".into();
    }
    let i = rng.gen_range(0..chars.len());
    let original = chars[i];
    let mut replacement = original;
    while replacement == original {
        replacement = rng.gen_range(b'!'..=b'~') as char;
    }
    chars[i] = replacement;
    chars.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn run(profile: &VictimProfile, seed: u64, horizon: Tick) -> Vec<(Tick, String)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut state = VictimState::new("12345678");
        state.show_prompt(100);
        let mut out = Vec::new();
        let mut now = 0;
        while let Some(wake) = state.next_wakeup() {
            now = wake.max(now);
            if now > horizon {
                break;
            }
            if let Some(VictimAction::Submit(s)) = step_victim(profile, &mut state, &mut rng, now) {
                out.push((now, s));
            }
        }
        out
    }

    #[test]
    fn very_active_submits_true_passphrase_once() {
        let profile = VictimProfile::for_engagement(Engagement::VeryActive);
        let subs = run(&profile, 7, u64::MAX);
        assert_eq!(subs.len(), 1);
        let (tick, text) = &subs[0];
        assert_eq!(text, "12345678");
        assert!((3_100..=10_100).contains(tick));
    }

    #[test]
    fn not_active_never_submits() {
        let profile = VictimProfile::for_engagement(Engagement::NotActive);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut state = VictimState::new("12345678");
        state.show_prompt(0);
        for now in (0..1_000_000).step_by(997) {
            assert_eq!(step_victim(&profile, &mut state, &mut rng, now), None);
            state.show_prompt(now);
        }
    }

    #[test]
    fn mild_active_is_reproducible() {
        let profile = VictimProfile::for_engagement(Engagement::MildActive);
        for seed in 0..20 {
            assert_eq!(run(&profile, seed, u64::MAX), run(&profile, seed, u64::MAX));
        }
    }

    #[test]
    fn typo_changes_exactly_one_character() {
        let profile = VictimProfile { typo_probability: 1.0, ..VictimProfile::for_engagement(Engagement::VeryActive) };
        let subs = run(&profile, 3, u64::MAX);
        let (_, text) = &subs[0];
        assert_eq!(text.len(), 8);
        let diff = text.chars().zip("12345678".chars()).filter(|(a, b)| a != b).count();
        assert_eq!(diff, 1);
    }

    #[test]
    fn defaults_validate_and_bad_profiles_do_not() {
        for e in [Engagement::VeryActive, Engagement::MildActive, Engagement::NotActive] {
            VictimProfile::for_engagement(e).validate().unwrap();
        }
        let mut p = VictimProfile::for_engagement(Engagement::NotActive);
        p.submit_probability_per_prompt = 0.5;
        assert_eq!(p.validate(), Err(ProfileError::InactiveSubmits));
        p = VictimProfile::for_engagement(Engagement::VeryActive);
        p.typo_probability = 1.5;
        assert!(p.validate().is_err());
    }
}
