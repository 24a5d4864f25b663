use bincx_core::binary::{BinaryComplex, BinaryDoubleComplex};
use bincx_core::field::Field;
use bincx_core::reduce::{nenashev_form, nenashev_form_iterative, shorten_to_len4, support_length, ShorteningChoices};
use bincx_core::torsion::{check_nenashev_relation, kappa, kappa_expression};

const FIELDS: [Field; 3] = [Field::Rationals, Field::Prime(5), Field::Prime(101)];

#[test]
fn both_reductions_preserve_kappa() {
    for (i, field) in FIELDS.into_iter().enumerate() {
        let b = BinaryComplex::random(field, &[2, 1, 2, 1, 1], 40 + i as u64);
        let k = kappa(&b).unwrap();
        let ch = ShorteningChoices::random(&b, 7, 2).unwrap();
        let len4 = shorten_to_len4(&b, &ch).unwrap();
        assert!(len4
            .terms()
            .iter()
            .all(|(_, t)| t.is_valid() && support_length(t).0 <= 4));
        assert_eq!(kappa_expression(&len4).unwrap(), k);
        let psi = nenashev_form(&b, &ch).unwrap();
        assert!(psi.terms().iter().all(|(_, t)| t.dims().len() == 3 && t.is_valid()));
        assert_eq!(kappa_expression(&psi).unwrap(), k);
    }
}

#[test]
fn direct_and_iterated_normal_forms_agree() {
    let b = BinaryComplex::random(Field::Prime(7), &[1, 1, 1], 3);
    let ch = ShorteningChoices::canonical(&b).unwrap();
    let direct = kappa_expression(&nenashev_form(&b, &ch).unwrap()).unwrap();
    let iterated = kappa_expression(&nenashev_form_iterative(&b, &ch).unwrap()).unwrap();
    assert_eq!(direct, iterated);
    assert_eq!(direct, kappa(&b).unwrap());
}

#[test]
fn tensor_squares_satisfy_the_relation() {
    let a = BinaryComplex::random(Field::Rationals, &[1, 2], 1);
    let c = BinaryComplex::random(Field::Rationals, &[2, 1], 2);
    let d = BinaryDoubleComplex::tensor_double(&a, &c).unwrap();
    d.validate().unwrap();
    assert!(check_nenashev_relation(&d).unwrap());
    assert!(kappa(&d.total_complex().unwrap()).is_ok());
}
