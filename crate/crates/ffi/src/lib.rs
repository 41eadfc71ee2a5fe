//! C ABI over the feature extractor, the model and the synthetic corpus.
//!
//! Every fallible call returns an [`AdffStatus`]. On failure the message is
//! available from [`adff_last_error`] on the same thread until the next
//! failing call. Handles are opaque and must be released with their `_free`
//! function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use adff::dataset::{segment_stack, synth_generate};
use adff::frontend::{extract, load_audio, AudioClip, MelSpectrogram, N_MELS};
use adff::model::{checkpoint, Adff, ModelConfig, Task};
use adff::nn::Mode;
use adff::{Error, Tensor};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdffStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Decode = 4,
    Shape = 5,
    Checkpoint = 6,
    BufferTooSmall = 7,
    Internal = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdffTask {
    Valence = 0,
    Arousal = 1,
    Multi = 2,
    TwoV = 3,
    TwoA = 4,
    Four = 5,
}

impl From<AdffTask> for Task {
    fn from(t: AdffTask) -> Self {
        match t {
            AdffTask::Valence => Task::Valence,
            AdffTask::Arousal => Task::Arousal,
            AdffTask::Multi => Task::Multi,
            AdffTask::TwoV => Task::TwoV,
            AdffTask::TwoA => Task::TwoA,
            AdffTask::Four => Task::Four,
        }
    }
}

/// Settings for [`adff_model_new`]; unspecified architecture settings take
/// their defaults.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct AdffModelParams {
    pub seg_num: u32,
    pub width: f64,
    pub lstm_hidden: u32,
    pub task: AdffTask,
    pub seed: u64,
}

/// Opaque log-Mel spectrogram.
pub struct AdffMel(MelSpectrogram);

/// Opaque model handle.
pub struct AdffModel(Adff<f32>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> AdffStatus {
    match e {
        Error::Io { .. } => AdffStatus::Io,
        Error::Decode { .. } | Error::ZeroLengthAudio(_) => AdffStatus::Decode,
        Error::Shape(_) => AdffStatus::Shape,
        Error::Checkpoint(_) => AdffStatus::Checkpoint,
        Error::Config(_) | Error::InvalidInput(_) | Error::Dataset(_) => {
            AdffStatus::InvalidArgument
        }
        _ => AdffStatus::Internal,
    }
}

fn fail(status: AdffStatus, message: impl AsRef<str>) -> AdffStatus {
    set_error(message.as_ref());
    status
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), AdffStatus>) -> AdffStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AdffStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(AdffStatus::Internal, "internal panic"),
    }
}

fn lift<T>(r: adff::Result<T>) -> Result<T, AdffStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn path_arg(p: *const c_char) -> Result<PathBuf, AdffStatus> {
    if p.is_null() {
        return Err(fail(AdffStatus::NullPointer, "path is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(PathBuf::from)
        .map_err(|_| fail(AdffStatus::InvalidArgument, "path is not valid UTF-8"))
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), AdffStatus> {
    if p.is_null() {
        Err(fail(AdffStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

/// Message of the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn adff_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn adff_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Decodes a WAV file and computes its log-Mel spectrogram.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn adff_mel_from_file(
    path: *const c_char,
    out: *mut *mut AdffMel,
) -> AdffStatus {
    guard(|| {
        non_null(out, "out")?;
        let path = path_arg(path)?;
        let clip = lift(load_audio(&path))?;
        let mel = lift(extract(&clip))?;
        *out = Box::into_raw(Box::new(AdffMel(mel)));
        Ok(())
    })
}

/// Computes the log-Mel spectrogram of mono samples, resampling to 44.1 kHz
/// when needed.
///
/// # Safety
/// `samples` must point to `len` floats and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn adff_mel_from_samples(
    samples: *const f32,
    len: usize,
    sample_rate: u32,
    out: *mut *mut AdffMel,
) -> AdffStatus {
    guard(|| {
        non_null(out, "out")?;
        non_null(samples, "samples")?;
        let data = std::slice::from_raw_parts(samples, len).to_vec();
        let mut clip = lift(AudioClip::new(data, sample_rate))?;
        if sample_rate != adff::frontend::SAMPLE_RATE {
            clip = adff::frontend::resample(&clip, adff::frontend::SAMPLE_RATE);
        }
        let mel = lift(extract(&clip))?;
        *out = Box::into_raw(Box::new(AdffMel(mel)));
        Ok(())
    })
}

/// Number of frames, or 0 for a null handle.
///
/// # Safety
/// `mel` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn adff_mel_frames(mel: *const AdffMel) -> usize {
    mel.as_ref().map_or(0, |m| m.0.frames)
}

/// Mel bands per frame (always 128).
#[no_mangle]
pub extern "C" fn adff_mel_bands() -> usize {
    N_MELS
}

/// Time-major `frames × 128` values, valid while the handle lives.
///
/// # Safety
/// `mel` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn adff_mel_data(mel: *const AdffMel) -> *const f32 {
    mel.as_ref().map_or(ptr::null(), |m| m.0.data.as_ptr())
}

/// # Safety
/// `mel` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn adff_mel_free(mel: *mut AdffMel) {
    if !mel.is_null() {
        drop(Box::from_raw(mel));
    }
}

fn boxed_model(config: ModelConfig, seed: u64, out: *mut *mut AdffModel) -> Result<(), AdffStatus> {
    let model = lift(Adff::<f32>::new(config, seed))?;
    unsafe { *out = Box::into_raw(Box::new(AdffModel(model))) };
    Ok(())
}

/// Creates a freshly initialised model.
///
/// # Safety
/// `params` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn adff_model_new(
    params: *const AdffModelParams,
    out: *mut *mut AdffModel,
) -> AdffStatus {
    guard(|| {
        non_null(params, "params")?;
        non_null(out, "out")?;
        let p = &*params;
        let config = ModelConfig {
            seg_num: p.seg_num as usize,
            width: p.width,
            lstm_hidden: p.lstm_hidden as usize,
            task: p.task.into(),
            ..ModelConfig::default()
        };
        boxed_model(config, p.seed, out)
    })
}

/// Creates a model from a JSON model configuration with every field given.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn adff_model_new_json(
    json: *const c_char,
    seed: u64,
    out: *mut *mut AdffModel,
) -> AdffStatus {
    guard(|| {
        non_null(json, "json")?;
        non_null(out, "out")?;
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| fail(AdffStatus::InvalidArgument, "json is not valid UTF-8"))?;
        let config: ModelConfig = serde_json::from_str(text)
            .map_err(|e| fail(AdffStatus::InvalidArgument, e.to_string()))?;
        boxed_model(config, seed, out)
    })
}

/// Loads a checkpoint.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn adff_model_load(
    path: *const c_char,
    out: *mut *mut AdffModel,
) -> AdffStatus {
    guard(|| {
        non_null(out, "out")?;
        let path = path_arg(path)?;
        let model = lift(checkpoint::load(&path))?;
        *out = Box::into_raw(Box::new(AdffModel(model)));
        Ok(())
    })
}

/// Writes a checkpoint.
///
/// # Safety
/// `model` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn adff_model_save(
    model: *const AdffModel,
    path: *const c_char,
) -> AdffStatus {
    guard(|| {
        non_null(model, "model")?;
        let path = path_arg(path)?;
        lift(checkpoint::save(&path, &(*model).0))
    })
}

/// Outputs per example: 1 for single-target regression, 2 for joint
/// regression or binary classes, 4 for quadrants. 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn adff_model_arity(model: *const AdffModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.config().task.arity())
}

/// Input channels the model expects. 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn adff_model_seg_num(model: *const AdffModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.config().seg_num)
}

unsafe fn run_eval(
    model: &mut Adff<f32>,
    input: &Tensor<f32>,
    out: *mut f32,
    out_len: usize,
) -> Result<(), AdffStatus> {
    let y = lift(model.forward(input, Mode::Eval))?;
    if out_len < y.len() {
        return Err(fail(
            AdffStatus::BufferTooSmall,
            format!("output needs {} values, buffer holds {out_len}", y.len()),
        ));
    }
    ptr::copy_nonoverlapping(y.data().as_ptr(), out, y.len());
    Ok(())
}

/// Eval-mode forward pass on a `(batch, seg_num, frames, 128)` input. Writes
/// `batch × arity` values to `out`.
///
/// # Safety
/// `input` must hold `batch·seg_num·frames·128` floats and `out` at least
/// `out_len`.
#[no_mangle]
pub unsafe extern "C" fn adff_model_forward(
    model: *mut AdffModel,
    input: *const f32,
    batch: usize,
    frames: usize,
    out: *mut f32,
    out_len: usize,
) -> AdffStatus {
    guard(|| {
        non_null(model, "model")?;
        non_null(input, "input")?;
        non_null(out, "out")?;
        let m = &mut (*model).0;
        let shape = [batch, m.config().seg_num, frames, N_MELS];
        let n = shape.iter().product();
        let x = lift(Tensor::from_vec(
            &shape,
            std::slice::from_raw_parts(input, n).to_vec(),
        ))?;
        run_eval(m, &x, out, out_len)
    })
}

/// Stacks a spectrogram into the model's channels and predicts one example.
///
/// # Safety
/// `model` and `mel` must be live handles; `out` must hold `out_len` floats.
#[no_mangle]
pub unsafe extern "C" fn adff_model_predict_mel(
    model: *mut AdffModel,
    mel: *const AdffMel,
    out: *mut f32,
    out_len: usize,
) -> AdffStatus {
    guard(|| {
        non_null(model, "model")?;
        non_null(mel, "mel")?;
        non_null(out, "out")?;
        let m = &mut (*model).0;
        let stacked = lift(segment_stack(&(*mel).0, m.config().seg_num))?;
        let mut shape = vec![1];
        shape.extend_from_slice(stacked.shape());
        let x = lift(stacked.reshape(&shape))?;
        run_eval(m, &x, out, out_len)
    })
}

/// # Safety
/// `model` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn adff_model_free(model: *mut AdffModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Writes a synthetic annotated corpus of `n` clips under `root`.
///
/// # Safety
/// `root` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn adff_synth_generate(
    root: *const c_char,
    n: usize,
    seed: u64,
    duration_s: f64,
) -> AdffStatus {
    guard(|| {
        let root = path_arg(root)?;
        lift(synth_generate(&root, n, seed, duration_s)).map(|_| ())
    })
}
