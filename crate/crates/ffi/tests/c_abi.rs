use std::ffi::{CStr, CString};
use std::ptr;

use adff_ffi::*;

fn c_path(p: &std::path::Path) -> CString {
    CString::new(p.to_str().unwrap()).unwrap()
}

fn last_error() -> String {
    unsafe {
        CStr::from_ptr(adff_last_error())
            .to_string_lossy()
            .into_owned()
    }
}

#[test]
fn synth_extract_predict_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let root = c_path(dir.path());
    assert_eq!(
        unsafe { adff_synth_generate(root.as_ptr(), 2, 3, 1.0) },
        AdffStatus::Ok
    );
    let wav = dir.path().join("audio").join("0001.wav");
    let wav = c_path(&wav);

    let mut mel = ptr::null_mut();
    assert_eq!(
        unsafe { adff_mel_from_file(wav.as_ptr(), &mut mel) },
        AdffStatus::Ok
    );
    let frames = unsafe { adff_mel_frames(mel) };
    assert_eq!(frames, 101);
    assert_eq!(adff_mel_bands(), 128);
    let data = unsafe { std::slice::from_raw_parts(adff_mel_data(mel), frames * 128) };
    assert!(data.iter().all(|v| v.is_finite()));

    let params = AdffModelParams {
        seg_num: 1,
        width: 1.0 / 32.0,
        lstm_hidden: 4,
        task: AdffTask::Multi,
        seed: 9,
    };
    let mut model = ptr::null_mut();
    assert_eq!(
        unsafe { adff_model_new(&params, &mut model) },
        AdffStatus::Ok
    );
    assert_eq!(unsafe { adff_model_arity(model) }, 2);
    assert_eq!(unsafe { adff_model_seg_num(model) }, 1);

    let mut small = [0f32; 1];
    assert_eq!(
        unsafe { adff_model_predict_mel(model, mel, small.as_mut_ptr(), small.len()) },
        AdffStatus::BufferTooSmall
    );
    let mut out = [0f32; 2];
    assert_eq!(
        unsafe { adff_model_predict_mel(model, mel, out.as_mut_ptr(), out.len()) },
        AdffStatus::Ok
    );
    let mut direct = [0f32; 2];
    assert_eq!(
        unsafe { adff_model_forward(model, data.as_ptr(), 1, frames, direct.as_mut_ptr(), 2) },
        AdffStatus::Ok
    );
    assert_eq!(out, direct);

    let ckpt = c_path(&dir.path().join("model.ckpt"));
    assert_eq!(
        unsafe { adff_model_save(model, ckpt.as_ptr()) },
        AdffStatus::Ok
    );
    let mut loaded = ptr::null_mut();
    assert_eq!(
        unsafe { adff_model_load(ckpt.as_ptr(), &mut loaded) },
        AdffStatus::Ok
    );
    let mut again = [0f32; 2];
    assert_eq!(
        unsafe { adff_model_predict_mel(loaded, mel, again.as_mut_ptr(), 2) },
        AdffStatus::Ok
    );
    assert_eq!(out, again);

    unsafe {
        adff_model_free(loaded);
        adff_model_free(model);
        adff_mel_free(mel);
    }
}

#[test]
fn invalid_inputs_map_to_status_codes() {
    let params = AdffModelParams {
        seg_num: 0,
        width: 0.5,
        lstm_hidden: 4,
        task: AdffTask::Valence,
        seed: 0,
    };
    let mut model = ptr::null_mut();
    assert_eq!(
        unsafe { adff_model_new(&params, &mut model) },
        AdffStatus::InvalidArgument
    );
    assert!(model.is_null());
    assert!(last_error().contains("seg_num"));

    let json = CString::new("{\"seg_num\": 2}").unwrap();
    assert_eq!(
        unsafe { adff_model_new_json(json.as_ptr(), 0, &mut model) },
        AdffStatus::InvalidArgument
    );

    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.ckpt");
    std::fs::write(&junk, b"not a checkpoint").unwrap();
    let junk = c_path(&junk);
    assert_eq!(
        unsafe { adff_model_load(junk.as_ptr(), &mut model) },
        AdffStatus::Checkpoint
    );

    let mut mel = ptr::null_mut();
    let short = [0f32; 10];
    assert_ne!(
        unsafe { adff_mel_from_samples(short.as_ptr(), short.len(), 44_100, &mut mel) },
        AdffStatus::Ok
    );
    assert!(mel.is_null());
    assert_eq!(
        unsafe { adff_model_forward(ptr::null_mut(), short.as_ptr(), 1, 1, ptr::null_mut(), 0) },
        AdffStatus::NullPointer
    );
    unsafe {
        adff_model_free(ptr::null_mut());
        adff_mel_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_entry_point() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/adff.h")).unwrap();
    for name in [
        "adff_last_error",
        "adff_version",
        "adff_mel_from_file",
        "adff_mel_from_samples",
        "adff_mel_free",
        "adff_model_new",
        "adff_model_new_json",
        "adff_model_load",
        "adff_model_save",
        "adff_model_forward",
        "adff_model_predict_mel",
        "adff_model_free",
        "adff_synth_generate",
        "ADFF_STATUS_BUFFER_TOO_SMALL",
        "typedef struct AdffModel AdffModel",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}
