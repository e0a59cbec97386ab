//! Dataset loading and saving, synthetic datasets, train/test splits and
//! pixel-corruption / block-occlusion generators.

mod corrupt;
mod dataset;
mod formats;
mod split;
mod synth;

pub use corrupt::{corrupt_pixels, default_occluder, occlude_block, Corrupted, Corruption, MAX_FRACTION};
pub use dataset::{load_directory, save_dataset, DatasetSource, FaceDataset};
pub use formats::{
    encode_pgm, parse_csv_matrix, parse_pgm, quantize, read_csv_image, read_csv_matrix, read_image, read_pgm,
    write_csv_image, write_csv_matrix, write_image, write_pgm, ImageFormat,
};
pub use split::{split_indices, split_train_test, SplitMode, SplitSpec};
pub use synth::{synth_dataset, SynthSpec};
