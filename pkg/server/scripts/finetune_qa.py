#!/usr/bin/env python3
"""Fine-tune an extractive QA checkpoint with no-answer support.

Recipe: AdamW with initial learning rate 5e-5, 3 epochs, warmup ratio 0.1;
keep the checkpoint with the best development-set performance. Use a dataset
with unanswerable questions (SQuAD2.0-style): the no-answer behaviour is what
lets the server filter questions about hallucinated facts.

Not part of CI; requires torch + transformers + datasets.
"""

import argparse


def build_parser():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--base-model", default="bert-large-uncased")
    parser.add_argument("--dataset", default="squad_v2")
    parser.add_argument("--output-dir", required=True)
    parser.add_argument("--learning-rate", type=float, default=5e-5)
    parser.add_argument("--epochs", type=float, default=3.0)
    parser.add_argument("--warmup-ratio", type=float, default=0.1)
    parser.add_argument("--per-device-batch-size", type=int, default=12)
    parser.add_argument("--max-length", type=int, default=384)
    parser.add_argument("--doc-stride", type=int, default=128)
    return parser


def main() -> int:
    args = build_parser().parse_args()
    try:
        from datasets import load_dataset
        from transformers import (
            AutoModelForQuestionAnswering,
            AutoTokenizer,
            DefaultDataCollator,
            Trainer,
            TrainingArguments,
        )
    except ImportError as exc:
        raise SystemExit(f"training extras missing ({exc}); pip install 'qags-model-server[models]' datasets")

    tokenizer = AutoTokenizer.from_pretrained(args.base_model)
    model = AutoModelForQuestionAnswering.from_pretrained(args.base_model)
    dataset = load_dataset(args.dataset)

    def encode(examples):
        encoded = tokenizer(
            examples["question"],
            examples["context"],
            truncation="only_second",
            max_length=args.max_length,
            stride=args.doc_stride,
            return_offsets_mapping=True,
            padding="max_length",
        )
        starts, ends = [], []
        for i, offsets in enumerate(encoded["offset_mapping"]):
            answer = examples["answers"][i]
            if not answer["answer_start"]:
                starts.append(0)  # CLS position encodes no-answer
                ends.append(0)
                continue
            start_char = answer["answer_start"][0]
            end_char = start_char + len(answer["text"][0])
            sequence_ids = encoded.sequence_ids(i)
            token_start = token_end = 0
            for idx, (lo, hi) in enumerate(offsets):
                if sequence_ids[idx] != 1:
                    continue
                if lo <= start_char < hi:
                    token_start = idx
                if lo < end_char <= hi:
                    token_end = idx
            starts.append(token_start)
            ends.append(token_end)
        encoded["start_positions"] = starts
        encoded["end_positions"] = ends
        encoded.pop("offset_mapping")
        return encoded

    encoded = dataset.map(encode, batched=True, remove_columns=dataset["train"].column_names)
    trainer = Trainer(
        model=model,
        args=TrainingArguments(
            output_dir=args.output_dir,
            learning_rate=args.learning_rate,
            num_train_epochs=args.epochs,
            warmup_ratio=args.warmup_ratio,
            per_device_train_batch_size=args.per_device_batch_size,
            eval_strategy="epoch",
            save_strategy="epoch",
            load_best_model_at_end=True,
        ),
        train_dataset=encoded["train"],
        eval_dataset=encoded["validation"],
        data_collator=DefaultDataCollator(),
    )
    trainer.train()
    trainer.save_model(args.output_dir)
    tokenizer.save_pretrained(args.output_dir)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
