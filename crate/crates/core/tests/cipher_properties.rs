use proptest::prelude::*;
use sdeqr_core::cipher::{add_code, complement16, deserialize, password_bytes, reverse_words, serialize};
use sdeqr_core::{decrypt, derive_code, encrypt, CipherError, CipherWords, Serialization, Stage};

// With at most 64 password bytes N stays below 10^8, so the code is at most
// 72 and scalars up to 0xFF00 always fit in 16 bits.
const MAX_SCALAR: u32 = 0xFF00;

fn message() -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop_oneof![
            3 => 0u32..0x80,
            2 => 0x80u32..0x100,
            1 => 0x100u32..=MAX_SCALAR,
        ]
        .prop_filter_map("surrogate", char::from_u32),
        0..200,
    )
    .prop_map(|cs| cs.into_iter().collect())
}

fn password() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(any::<u8>(), 1..=64)
}

fn serialization() -> impl Strategy<Value = Serialization> {
    prop_oneof![Just(Serialization::Entity), Just(Serialization::Raw16)]
}

proptest! {
    #[test]
    fn decrypt_inverts_encrypt(m in message(), p in password()) {
        let c = encrypt(&m, &p).unwrap();
        prop_assert_eq!(c.stage(), Stage::Final);
        prop_assert_eq!(c.len(), m.chars().count());
        prop_assert_eq!(decrypt(&c, &p).unwrap(), m);
    }

    #[test]
    fn encrypt_is_the_composition_of_its_steps(m in message(), p in password()) {
        let code = derive_code(&p).unwrap();
        // the three steps spelled out on plain integers
        let mut expected: Vec<u16> = m.chars().map(|c| (u32::from(c) + code.code()) as u16).collect();
        expected.reverse();
        let expected: Vec<u16> = expected.into_iter().map(|w| !w).collect();

        let composed = complement16(reverse_words(add_code(&m, &code).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(composed.words(), &expected[..]);
        prop_assert_eq!(encrypt(&m, &p).unwrap(), composed);
    }

    #[test]
    fn stage_steps_are_involutions(words in prop::collection::vec(any::<u16>(), 0..100)) {
        let added = CipherWords::new(words.clone(), Stage::Added);
        let twice = reverse_words(reverse_words(added.clone()).unwrap()).unwrap();
        prop_assert_eq!(&twice, &added);

        let reversed = CipherWords::new(words.clone(), Stage::Reversed);
        let twice = complement16(complement16(reversed.clone()).unwrap()).unwrap();
        prop_assert_eq!(&twice, &reversed);
        prop_assert_eq!(reverse_words(added).unwrap().len(), words.len());
    }

    #[test]
    fn serialization_round_trip(words in prop::collection::vec(any::<u16>(), 0..300), fmt in serialization()) {
        let bytes = serialize(&words, fmt);
        prop_assert_eq!(deserialize(&bytes, fmt).unwrap(), words);
    }

    #[test]
    fn bare_entities_parse_like_terminated_ones(words in prop::collection::vec(any::<u16>(), 0..50)) {
        let bare: String = words.iter().map(|w| format!("&#{w}")).collect();
        prop_assert_eq!(deserialize(bare.as_bytes(), Serialization::Entity).unwrap(), words);
    }

    #[test]
    fn code_depends_only_on_length_and_byte_sum(mut p in password(), seed in any::<u64>()) {
        let before = derive_code(&p).unwrap();
        // any permutation keeps plen and the byte sum
        let n = p.len();
        p.rotate_left((seed as usize) % n);
        p.reverse();
        let after = derive_code(&p).unwrap();
        prop_assert_eq!(before.code(), after.code());
        prop_assert_eq!(before.n(), after.n());
        prop_assert_eq!(before.plen(), n);
    }

    #[test]
    fn text_passwords_map_to_latin1_bytes(s in "[\\x01-\\xFF]{1,20}") {
        let bytes = password_bytes(&s).unwrap();
        prop_assert_eq!(bytes.len(), s.chars().count());
        prop_assert!(s.chars().zip(&bytes).all(|(c, &b)| u32::from(c) == u32::from(b)));
    }
}

#[test]
fn permuted_passwords_share_a_code() {
    assert_eq!(derive_code(b"ab").unwrap().code(), derive_code(b"ba").unwrap().code());
}

#[test]
fn steps_refuse_the_wrong_stage() {
    let final_words = CipherWords::from_final(vec![1, 2]);
    assert!(matches!(reverse_words(final_words), Err(CipherError::StageOrder { .. })));
    let added = CipherWords::new(vec![1, 2], Stage::Added);
    assert!(matches!(complement16(added.clone()), Err(CipherError::StageOrder { .. })));
    assert!(matches!(decrypt(&added, b"pw"), Err(CipherError::StageOrder { .. })));
}

#[test]
fn overflow_is_rejected() {
    let err = encrypt("a\u{FFFF}", b"Hello World").unwrap_err();
    assert_eq!(err, CipherError::Overflow16 { index: 1, code: 23 });
}

#[test]
fn entity_errors() {
    assert!(matches!(deserialize(b"&#70000;", Serialization::Entity), Err(CipherError::MalformedEntity { .. })));
    assert!(matches!(deserialize(b"&#;", Serialization::Entity), Err(CipherError::MalformedEntity { .. })));
    assert!(matches!(deserialize(b"96;", Serialization::Entity), Err(CipherError::MalformedEntity { .. })));
    assert_eq!(deserialize(b"&#96&#55", Serialization::Entity).unwrap(), vec![96, 55]);
    assert_eq!(deserialize(&[1, 2, 3], Serialization::Raw16), Err(CipherError::OddLength { len: 3 }));
}

#[test]
fn empty_password() {
    assert_eq!(derive_code(b"").unwrap_err(), CipherError::EmptyPassword);
    assert!(matches!(password_bytes("€"), Err(CipherError::PasswordCharacter { index: 0, .. })));
}
