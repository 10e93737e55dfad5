//! Property tests over the public API.

use proptest::prelude::*;

use repeatcode::outer::{GaloisField, OuterCode, OuterCodeParams, ReedSolomon};
use repeatcode::rng::stream_rng;
use repeatcode::{BitString, ChannelModel, RepeatDistribution, Transmission};

fn bits(max_len: usize) -> impl Strategy<Value = BitString> {
    prop::collection::vec(any::<bool>(), 0..max_len).prop_map(BitString::from_bits)
}

fn pmf() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..1.0, 1..4).prop_map(|w| {
        let total: f64 = w.iter().sum();
        w.into_iter().map(|v| v / total).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spans_tile_the_output(x in bits(64), p in pmf(), seed in any::<u64>()) {
        let channel = ChannelModel::Repeat(RepeatDistribution::from_pmf(&p).unwrap());
        let sent: Transmission = channel.transmit(&x, &mut stream_rng(seed, 0));
        prop_assert_eq!(sent.spans.len(), x.len());
        let mut at = 0;
        for (i, s) in sent.spans.iter().enumerate() {
            prop_assert_eq!(s.start, at);
            for j in s.clone() {
                prop_assert_eq!(sent.output.get(j), x.get(i));
            }
            at = s.end;
        }
        prop_assert_eq!(at, sent.output.len());
    }

    #[test]
    fn sampled_outputs_have_positive_likelihood(x in bits(24), p in pmf(), seed in any::<u64>()) {
        let channel = ChannelModel::Repeat(RepeatDistribution::from_pmf(&p).unwrap());
        let y = channel.apply(&x, seed);
        prop_assert!(channel.likelihood(&x, &y) > 0.0);
        let trimmed = channel.trimming_repeat().unwrap();
        let z = trimmed.apply(&x, seed);
        prop_assert!(trimmed.log_likelihood(&x, &z).is_finite());
    }

    #[test]
    fn rs_corrects_within_radius(
        data in prop::collection::vec(0u16..32, 23),
        erasures in prop::collection::btree_set(0usize..31, 0..=8),
        seed in any::<u64>(),
    ) {
        use rand::Rng;
        let rs = ReedSolomon::new(GaloisField::new(5).unwrap(), 31, 23).unwrap();
        let cw = rs.encode(&data).unwrap();
        let mut received: Vec<Option<u16>> = cw.iter().copied().map(Some).collect();
        for &p in &erasures {
            received[p] = None;
        }
        let mut rng = stream_rng(seed, 1);
        let budget = (8 - erasures.len()) / 2;
        let mut hit = 0;
        while hit < budget {
            let p = rng.gen_range(0..31);
            if received[p] == Some(cw[p]) {
                received[p] = Some(cw[p] ^ rng.gen_range(1..32));
                hit += 1;
            }
        }
        prop_assert_eq!(rs.decode(&received).unwrap().codeword, cw);
    }

    #[test]
    fn outer_decoding_ignores_symbol_order(seed in any::<u64>(), drop in 0usize..4) {
        use rand::seq::SliceRandom;
        use rand::Rng;
        let code = OuterCode::new(OuterCodeParams::new(4, 15, 11)).unwrap();
        let mut rng = stream_rng(seed, 2);
        let data = BitString::from_bits((0..44).map(|_| rng.gen::<bool>()));
        let mut symbols = code.encode(&data).unwrap();
        symbols.shuffle(&mut rng);
        symbols.truncate(15 - drop);
        prop_assert_eq!(code.decode(&symbols).unwrap(), data);
    }
}
