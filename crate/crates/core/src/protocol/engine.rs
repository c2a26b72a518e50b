//! Runs one auction end to end over a shared [`QubitStore`], logging every
//! event to a [`Transcript`].

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{
    decode_bid, determine_winner, encode_bid, epr_encode_bid, insert_decoys, post_confirm,
    run_decoy_check, strip_decoys, Bid, CarrierSequence, CarrierStates, DecoyRecord, EprSequence,
    EventKind, PartyId, Permutation, PostConfirmation, ProtocolError, Step, Transcript,
    WinnerDecision,
};
use crate::adversary::{
    collusion_measure_disordered, false_announcement, Channel, ChannelTap, CollusionGuess,
    DishonestBehavior,
};
use crate::quantum::{CanonicalState, QubitId, QubitStore, StateVector};
use crate::scenario::{BidSource, PermutationPolicy, Scenario};
use crate::seed::{derive_seed, TAP_STREAM};

const BROADCAST: &str = "all";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Completed,
    AbortedChannelCheck,
    AbortedPostConfirmation,
    /// Several bidders share the highest bid and the tie policy announces
    /// no winner.
    Tie,
}

/// Result of one decoy check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub step: Step,
    pub sender: PartyId,
    pub receiver: PartyId,
    pub checked: usize,
    pub mismatches: usize,
    pub error_rate: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuctionOutcome {
    pub verdict: Verdict,
    /// Present exactly when the auction completed.
    pub winner: Option<PartyId>,
    pub announced_bid: Option<Bid>,
    /// What the auctioneer announced, honest or not.
    pub announcement: Option<(PartyId, Bid)>,
    pub tied: Vec<PartyId>,
    pub true_bids: BTreeMap<PartyId, Bid>,
    pub decoded_bids: BTreeMap<PartyId, Bid>,
    /// Carrier registers right after encoding; absent for a bidder whose
    /// carriers are entangled with an adversary's ancillas.
    pub encoded_registers: BTreeMap<PartyId, StateVector>,
    pub checks: Vec<CheckSummary>,
    pub post_confirmations: Vec<PostConfirmation>,
    pub collusion_guesses: Vec<CollusionGuess>,
}

impl AuctionOutcome {
    fn new(true_bids: BTreeMap<PartyId, Bid>) -> Self {
        AuctionOutcome {
            verdict: Verdict::Completed,
            winner: None,
            announced_bid: None,
            announcement: None,
            tied: Vec::new(),
            true_bids,
            decoded_bids: BTreeMap::new(),
            encoded_registers: BTreeMap::new(),
            checks: Vec::new(),
            post_confirmations: Vec::new(),
            collusion_guesses: Vec::new(),
        }
    }

    /// True iff any decoy check failed.
    pub fn channel_detected(&self) -> bool {
        self.checks.iter().any(|c| !c.pass)
    }
}

struct TapState {
    tap: ChannelTap,
    channel: Channel,
    targets: Vec<PartyId>,
    rng: ChaCha8Rng,
}

/// A carrier sequence on its way to a bidder, with its decoys.
struct Outbound {
    seq: CarrierSequence,
    augmented: Vec<QubitId>,
    records: Vec<DecoyRecord>,
}

/// An EPR copy from `seq.owner` to `seq.target`, with its decoys.
struct EprOutbound {
    seq: EprSequence,
    augmented: Vec<QubitId>,
    records: Vec<DecoyRecord>,
}

struct Auction<'a> {
    scenario: &'a Scenario,
    m: usize,
    bidders: Vec<PartyId>,
    store: QubitStore,
    rng: ChaCha8Rng,
    tap: Option<TapState>,
    dishonest: Option<DishonestBehavior>,
    transcript: Transcript,
    outcome: AuctionOutcome,
}

/// Runs the scenario with its own seed.
pub fn run_auction(scenario: &Scenario) -> Result<(AuctionOutcome, Transcript), ProtocolError> {
    run_auction_seeded(scenario, scenario.seed)
}

/// Runs the scenario with an explicit seed. Identical inputs give identical
/// outcomes and transcripts.
pub fn run_auction_seeded(
    scenario: &Scenario,
    seed: u64,
) -> Result<(AuctionOutcome, Transcript), ProtocolError> {
    scenario
        .validate()
        .map_err(|e| ProtocolError::InvalidScenario(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = scenario.bid_length;
    let bidders: Vec<PartyId> = (1..=scenario.bidder_count()).map(PartyId::Bidder).collect();
    let true_bids = match &scenario.bids {
        BidSource::Explicit(bids) => bidders.iter().copied().zip(bids.iter().cloned()).collect(),
        BidSource::Random(_) => bidders
            .iter()
            .map(|p| Ok((*p, Bid::random(m, &mut rng)?)))
            .collect::<Result<BTreeMap<_, _>, ProtocolError>>()?,
    };
    let tap = scenario
        .attack
        .as_ref()
        .and_then(|a| a.tap())
        .map(|(behavior, channel, targets)| TapState {
            tap: ChannelTap::new(behavior),
            channel,
            targets: targets.iter().map(|t| PartyId::Bidder(*t)).collect(),
            rng: ChaCha8Rng::seed_from_u64(derive_seed(seed, TAP_STREAM)),
        });
    let dishonest = scenario.attack.as_ref().and_then(|a| a.dishonest());
    let mut auction = Auction {
        scenario,
        m,
        bidders,
        store: QubitStore::new(),
        rng,
        tap,
        dishonest,
        transcript: Transcript::new(),
        outcome: AuctionOutcome::new(true_bids),
    };
    auction.run()?;
    Ok((auction.outcome, auction.transcript))
}

impl Auction<'_> {
    fn run(&mut self) -> Result<(), ProtocolError> {
        let outbound = self.distribute_carriers()?;
        if !self.check_carrier_channels(&outbound)? {
            return Ok(());
        }
        let carriers: Vec<CarrierSequence> = outbound.into_iter().map(|o| o.seq).collect();
        self.encode_bids(&carriers)?;
        let (mut held, permutations) = match self.exchange_epr()? {
            Some(x) => x,
            None => return Ok(()),
        };
        if let Some(DishonestBehavior::CollusionMeasureDisordered { colluders }) = &self.dishonest {
            self.outcome.collusion_guesses = collusion_measure_disordered(
                &mut self.store,
                colluders,
                &mut held,
                &self.outcome.true_bids,
                &mut self.rng,
            )?;
        }
        let decision = match self.return_and_announce(&carriers)? {
            Some(d) => d,
            None => return Ok(()),
        };
        self.post_confirmation(decision, &held, &permutations)
    }

    /// Hands a sequence to the channel; a tap on this edge acts on it.
    fn transmit(
        &mut self,
        channel: Channel,
        owner: PartyId,
        qubits: &[QubitId],
    ) -> Result<Option<&'static str>, ProtocolError> {
        match &mut self.tap {
            Some(t) if t.channel == channel && t.targets.contains(&owner) => {
                t.tap.act(&mut self.store, qubits, &mut t.rng)?;
                Ok(Some(t.tap.behavior.name()))
            }
            _ => Ok(None),
        }
    }

    fn amplitudes(&self, qubits: &[QubitId]) -> Value {
        let per_qubit: Vec<Value> = qubits
            .iter()
            .map(|q| match self.store.joint_state(&[*q]) {
                Ok(sv) => json!(sv.canonical_amplitudes()),
                Err(_) => Value::Null,
            })
            .collect();
        json!(per_qubit)
    }

    fn carrier_states(&mut self, k: usize) -> Result<CarrierStates, ProtocolError> {
        match &self.scenario.carriers {
            Some(fixed) => Ok(fixed[k].clone()),
            None => CarrierStates::random(self.m, &mut self.rng),
        }
    }

    // S2: the auctioneer prepares carriers, hides decoys among them and
    // sends one sequence to each bidder.
    fn distribute_carriers(&mut self) -> Result<Vec<Outbound>, ProtocolError> {
        let d = self
            .scenario
            .decoy_policy()
            .map_err(|e| ProtocolError::InvalidScenario(e.to_string()))?
            .decoys_for(self.m)?;
        let mut out = Vec::with_capacity(self.bidders.len());
        for (k, bidder) in self.bidders.clone().into_iter().enumerate() {
            let states = self.carrier_states(k)?;
            let seq = CarrierSequence::from_states(&mut self.store, bidder, &states)?;
            let (augmented, records) =
                insert_decoys(&mut self.store, &seq.qubits, d, &mut self.rng);
            let mut labels: Vec<&str> = Vec::with_capacity(augmented.len());
            let mut carriers = seq.initial_states.iter();
            for pos in 0..augmented.len() {
                match records.iter().find(|r| r.position == pos) {
                    Some(r) => labels.push(r.state.label()),
                    None => labels.push(carriers.next().expect("data slot").label()),
                }
            }
            let mut payload = json!({
                "sequence": format!("P'{}", k + 1),
                "qubits": augmented.len(),
                "carriers": self.m,
                "decoys": d,
                "states": labels,
            });
            if self.scenario.debug {
                payload["amplitudes"] = self.amplitudes(&augmented);
            }
            if let Some(tap) = self.transmit(Channel::S2, bidder, &augmented)? {
                payload["tap"] = json!(tap);
            }
            self.transcript.record(
                Step::S2,
                PartyId::Auctioneer,
                bidder,
                EventKind::Qsend,
                payload,
            );
            out.push(Outbound {
                seq,
                augmented,
                records,
            });
        }
        Ok(out)
    }

    /// Announce decoy positions and bases, measure, compare; returns pass.
    fn decoy_check(
        &mut self,
        step: Step,
        sender: PartyId,
        receiver: PartyId,
        augmented: &[QubitId],
        records: &[DecoyRecord],
    ) -> Result<bool, ProtocolError> {
        self.transcript.record(
            step,
            sender,
            receiver,
            EventKind::Announce,
            json!({
                "positions": records.iter().map(|r| r.position).collect::<Vec<_>>(),
                "bases": records.iter().map(|r| r.basis).collect::<Vec<_>>(),
            }),
        );
        let check = run_decoy_check(
            &mut self.store,
            augmented,
            records,
            self.scenario.error_threshold,
            &mut self.rng,
        )?;
        self.transcript.record(
            step,
            receiver,
            sender,
            EventKind::Announce,
            json!({ "results": check.results }),
        );
        self.transcript.record(
            step,
            sender,
            receiver,
            EventKind::Check,
            json!({
                "checked": check.checked,
                "mismatches": check.mismatches,
                "error_rate": check.error_rate,
                "pass": check.pass,
            }),
        );
        self.outcome.checks.push(CheckSummary {
            step,
            sender,
            receiver,
            checked: check.checked,
            mismatches: check.mismatches,
            error_rate: check.error_rate,
            pass: check.pass,
        });
        Ok(check.pass)
    }

    fn abort(&mut self, step: Step, verdict: Verdict, extra: Value) {
        self.outcome.verdict = verdict;
        let mut payload = json!({ "verdict": verdict });
        if let (Value::Object(p), Value::Object(e)) = (&mut payload, extra) {
            p.extend(e);
        }
        self.transcript.record(
            step,
            PartyId::Auctioneer,
            BROADCAST,
            EventKind::Verdict,
            payload,
        );
    }

    // S3: every carrier channel is checked; any failure abandons the run.
    fn check_carrier_channels(&mut self, outbound: &[Outbound]) -> Result<bool, ProtocolError> {
        let mut failed = Vec::new();
        for o in outbound {
            if !self.decoy_check(
                Step::S3,
                PartyId::Auctioneer,
                o.seq.owner,
                &o.augmented,
                &o.records,
            )? {
                failed.push(o.seq.owner);
            }
        }
        if failed.is_empty() {
            return Ok(true);
        }
        self.abort(
            Step::S3,
            Verdict::AbortedChannelCheck,
            json!({ "failed_channels": failed }),
        );
        Ok(false)
    }

    // S4: each bidder applies I or iσy per bid bit.
    fn encode_bids(&mut self, carriers: &[CarrierSequence]) -> Result<(), ProtocolError> {
        for seq in carriers {
            let bid = self.outcome.true_bids[&seq.owner].clone();
            encode_bid(&mut self.store, &seq.qubits, &bid)?;
            if let Ok(register) = self.store.joint_state(&seq.qubits) {
                self.outcome.encoded_registers.insert(seq.owner, register);
            }
        }
        Ok(())
    }

    fn permutation_for(&mut self, k: usize) -> Permutation {
        match &self.scenario.permutations {
            Some(fixed) => fixed[k].clone(),
            None => match self.scenario.permutation_policy {
                PermutationPolicy::PairSplitting => {
                    Permutation::random_pair_splitting(self.m, &mut self.rng)
                }
                PermutationPolicy::Uniform => Permutation::random(self.m, &mut self.rng),
            },
        }
    }

    // S5: every bidder sends each other bidder a permuted EPR copy of
    // its bid with m decoys, and each copy's channel is checked.
    #[allow(clippy::type_complexity)]
    fn exchange_epr(
        &mut self,
    ) -> Result<
        Option<(
            BTreeMap<(PartyId, PartyId), Vec<QubitId>>,
            BTreeMap<PartyId, Permutation>,
        )>,
        ProtocolError,
    > {
        let mut permutations = BTreeMap::new();
        let mut outbound = Vec::new();
        for (k, owner) in self.bidders.clone().into_iter().enumerate() {
            let labels = epr_encode_bid(&self.outcome.true_bids[&owner])?;
            let perm = self.permutation_for(k);
            for target in self.bidders.clone() {
                if target == owner {
                    continue;
                }
                let seq = EprSequence::prepare(
                    &mut self.store,
                    owner,
                    target,
                    labels.clone(),
                    perm.clone(),
                )?;
                let (augmented, records) =
                    insert_decoys(&mut self.store, &seq.qubits, self.m, &mut self.rng);
                let mut payload = json!({
                    "sequence": format!("R{}{}", owner.bidder_index().unwrap_or(0), target.bidder_index().unwrap_or(0)),
                    "qubits": augmented.len(),
                    "epr_qubits": self.m,
                    "decoys": self.m,
                    "bell_labels": labels,
                    "decoy_states": records.iter().map(|r| r.state).collect::<Vec<_>>(),
                });
                if self.scenario.debug {
                    payload["amplitudes"] = self.amplitudes(&augmented);
                }
                if let Some(tap) = self.transmit(Channel::S5, owner, &augmented)? {
                    payload["tap"] = json!(tap);
                }
                self.transcript
                    .record(Step::S5, owner, target, EventKind::Qsend, payload);
                outbound.push(EprOutbound {
                    seq,
                    augmented,
                    records,
                });
            }
            permutations.insert(owner, perm);
        }
        let mut failed = Vec::new();
        for o in &outbound {
            if !self.decoy_check(
                Step::S5,
                o.seq.owner,
                o.seq.target,
                &o.augmented,
                &o.records,
            )? {
                failed.push(json!([o.seq.owner, o.seq.target]));
            }
        }
        if !failed.is_empty() {
            self.abort(
                Step::S5,
                Verdict::AbortedChannelCheck,
                json!({ "failed_channels": failed }),
            );
            return Ok(None);
        }
        let held = outbound
            .into_iter()
            .map(|o| {
                let data = strip_decoys(&o.augmented, &o.records);
                ((o.seq.target, o.seq.owner), data)
            })
            .collect();
        Ok(Some((held, permutations)))
    }

    // S6: carriers go back, the auctioneer decodes and announces.
    fn return_and_announce(
        &mut self,
        carriers: &[CarrierSequence],
    ) -> Result<Option<(PartyId, Bid)>, ProtocolError> {
        for seq in carriers {
            let bid = &self.outcome.true_bids[&seq.owner];
            let encoded: Vec<CanonicalState> = seq
                .initial_states
                .iter()
                .zip(bid.bits())
                .map(|(s, b)| if *b { s.flipped() } else { *s })
                .collect();
            let mut payload = json!({
                "sequence": format!("P''{}", seq.owner.bidder_index().unwrap_or(0)),
                "qubits": seq.len(),
                "carriers": seq.len(),
                "bid_bits": seq.len(),
                "states": encoded,
            });
            if self.scenario.debug {
                payload["amplitudes"] = self.amplitudes(&seq.qubits);
            }
            if let Some(tap) = self.transmit(Channel::S6, seq.owner, &seq.qubits)? {
                payload["tap"] = json!(tap);
            }
            self.transcript.record(
                Step::S6,
                seq.owner,
                PartyId::Auctioneer,
                EventKind::Qsend,
                payload,
            );
        }
        for seq in carriers {
            let bid = decode_bid(
                &mut self.store,
                &seq.initial_states,
                &seq.qubits,
                &mut self.rng,
            )?;
            self.outcome.decoded_bids.insert(seq.owner, bid);
        }
        let honest = determine_winner(&self.outcome.decoded_bids, self.scenario.tie_policy)?;
        let decision = match &self.dishonest {
            Some(DishonestBehavior::FalseAnnouncement { winner, fabricated }) => {
                false_announcement(&honest, *winner, fabricated)
            }
            _ => honest,
        };
        match decision {
            WinnerDecision::Winner(winner, bid) => {
                self.transcript.record(
                    Step::S6,
                    PartyId::Auctioneer,
                    BROADCAST,
                    EventKind::Announce,
                    json!({ "winner": winner, "bid": bid }),
                );
                self.outcome.announcement = Some((winner, bid.clone()));
                Ok(Some((winner, bid)))
            }
            WinnerDecision::Tie(tied, bid) => {
                self.transcript.record(
                    Step::S6,
                    PartyId::Auctioneer,
                    BROADCAST,
                    EventKind::Announce,
                    json!({ "winner": Value::Null, "tied": tied, "bid": bid }),
                );
                self.outcome.tied = tied;
                self.abort(Step::S6, Verdict::Tie, json!({}));
                Ok(None)
            }
        }
    }

    // S7: the winner reveals its permutation and every other bidder
    // checks its EPR copy against the announcement.
    fn post_confirmation(
        &mut self,
        (winner, announced): (PartyId, Bid),
        held: &BTreeMap<(PartyId, PartyId), Vec<QubitId>>,
        permutations: &BTreeMap<PartyId, Permutation>,
    ) -> Result<(), ProtocolError> {
        let perm = permutations[&winner].clone();
        self.transcript.record(
            Step::S7,
            winner,
            BROADCAST,
            EventKind::Announce,
            json!({ "permutation": perm }),
        );
        let mut verifiers = Vec::new();
        let mut unverified = Vec::new();
        for bidder in &self.bidders {
            if *bidder == winner {
                continue;
            }
            match held.get(&(*bidder, winner)) {
                Some(qubits) => verifiers.push((*bidder, qubits.clone())),
                // copy already consumed by a collusion measurement
                None => unverified.push(*bidder),
            }
        }
        let results = post_confirm(
            &mut self.store,
            &perm,
            &verifiers,
            &announced,
            &mut self.rng,
        )?;
        for r in &results {
            self.transcript.record(
                Step::S7,
                r.verifier,
                BROADCAST,
                EventKind::Check,
                json!({ "recovered": r.recovered, "announced": announced, "pass": r.pass }),
            );
        }
        let all_pass = results.iter().all(|r| r.pass);
        self.outcome.post_confirmations = results;
        let discarded: Vec<String> = held
            .keys()
            .filter(|(_, owner)| *owner != winner)
            .map(|(holder, owner)| format!("{owner}->{holder}"))
            .collect();
        let extra = json!({
            "winner": winner,
            "bid": announced,
            "discarded_epr": discarded,
            "unverified_by": unverified,
        });
        if all_pass {
            self.outcome.verdict = Verdict::Completed;
            self.outcome.winner = Some(winner);
            self.outcome.announced_bid = Some(announced);
            let mut payload = json!({ "verdict": Verdict::Completed });
            if let (Value::Object(p), Value::Object(e)) = (&mut payload, extra) {
                p.extend(e);
            }
            self.transcript.record(
                Step::S7,
                PartyId::Auctioneer,
                BROADCAST,
                EventKind::Verdict,
                payload,
            );
        } else {
            self.abort(Step::S7, Verdict::AbortedPostConfirmation, extra);
        }
        Ok(())
    }
}
