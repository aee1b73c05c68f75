// Trains a small CNN-rand model on a handful of in-memory sentences and
// labels two new ones.
//
//   ./classify_sentences

#include <iostream>
#include <string>
#include <vector>

#include "wordcnn/classifier/trainer.hpp"
#include "wordcnn/text/dataset.hpp"
#include "wordcnn/text/tokenize.hpp"

using namespace wordcnn;

int main() {
  const std::vector<std::pair<std::string, std::string>> raw = {
      {"pos", "a warm , funny and moving film"},
      {"pos", "the cast is wonderful and the script is sharp"},
      {"pos", "one of the best films of the year"},
      {"pos", "funny , smart and full of heart"},
      {"pos", "a moving and wonderful story"},
      {"pos", "sharp writing and a great cast"},
      {"neg", "a dull , lifeless and tedious mess"},
      {"neg", "the plot is thin and the acting is flat"},
      {"neg", "one of the worst films of the year"},
      {"neg", "tedious , flat and badly written"},
      {"neg", "a lifeless and dull story"},
      {"neg", "thin writing and a bad cast"},
  };
  std::vector<text::LabelledText> items;
  for (const auto& [label, sentence] : raw) {
    items.push_back({label, text::tokenize(sentence), sentence});
  }
  const auto ds = text::assemble_dataset("toy", items);

  classifier::CnnConfig config;
  config.embedding_dim = 20;
  config.feature_maps = 8;
  config.epochs = 30;
  config.batch_size = 4;
  config.schedule.base = config.schedule.second = config.schedule.third = 0.01;

  classifier::TrainingData data;
  data.vocab = &ds.vocab;
  data.classes = ds.class_count();
  data.max_length = ds.max_length();
  data.train = classifier::all_of(ds.examples);
  const auto result = classifier::train<float>(data, config);
  std::cout << "final training loss " << result.history.back().train_loss << '\n';

  for (const std::string sentence : {"a wonderful and funny cast", "a dull and flat plot"}) {
    text::Example ex;
    for (const auto& tok : text::tokenize(sentence)) ex.tokens.push_back(ds.vocab.id_of(tok));
    const auto batch = classifier::encode_batch({&ex}, data.max_length, config.max_width());
    const auto cache = classifier::forward(result.model, batch);
    const auto label = classifier::argmax_row<float>(cache.logits.row(0));
    std::cout << ds.label_names[label] << '\t' << sentence << '\n';
  }
}
