//! Train a small GIN classifier and checkpoint it to disk.
//!
//! Run with: cargo run --release --example train_classifier

use octal::dataset::{encode_dataset, generate_corpus, split, Profile};
use octal::graph::{make_dictionary, EncodingScheme, DEFAULT_SIGMA};
use octal::nn::{
    evaluate_classification_inputs, graph_input, load_checkpoint, save_checkpoint, train,
    Checkpoint, Descriptor, GraphInput, Hyperparams, ModelParams, Variant,
};

fn main() {
    let ds = generate_corpus(Profile::ShortLike, 120, 3).unwrap();
    let (train_set, val_set) = split(&ds, 0.8, 1);
    let dict = make_dictionary(0, DEFAULT_SIGMA);
    let encode = |d| {
        encode_dataset(d, EncodingScheme::Gaussian, false, &dict)
            .unwrap()
            .iter()
            .map(graph_input)
            .collect::<Vec<GraphInput>>()
    };
    let train_inputs = encode(&train_set);
    let val_inputs = encode(&val_set);

    let hp = Hyperparams {
        learning_rate: 1e-3,
        max_epochs: 30,
        batch_size: 16,
        seed: 0,
        ..Hyperparams::default()
    };
    let desc = Descriptor::new(Variant::Gin, train_inputs[0].x.ncols());
    let (best, history) = train(ModelParams::init(desc, 0), &train_inputs, &val_inputs, &hp).unwrap();

    for rec in history.iter().step_by(5) {
        println!(
            "epoch {:3}  train loss {:.4}  val accuracy {:.3}",
            rec.epoch, rec.train_loss, rec.val_accuracy
        );
    }
    let metrics = evaluate_classification_inputs(&best, &val_inputs);
    println!("best checkpoint: val accuracy {:.3}", metrics.accuracy);

    let path = std::env::temp_dir().join("octal_example_model.ckpt");
    save_checkpoint(
        &path,
        &Checkpoint {
            params: best,
            hyperparams: hp,
            dict_seed: 0,
            dict_sigma: DEFAULT_SIGMA,
            scheme: EncodingScheme::Gaussian,
            directed: false,
        },
    )
    .unwrap();
    let back = load_checkpoint(&path).unwrap();
    assert_eq!(
        evaluate_classification_inputs(&back.params, &val_inputs).accuracy,
        metrics.accuracy
    );
    println!("checkpoint round-tripped via {}", path.display());
}
