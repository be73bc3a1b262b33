#ifndef LLMDEP_SRC_PROMPT_TEMPLATES_H_
#define LLMDEP_SRC_PROMPT_TEMPLATES_H_

#include <string_view>

// Placeholders: {article} {language} {n} {sentence} {words}.
// Line breaks are part of the templates.
namespace llmdep::templates::v1 {

inline constexpr std::string_view kSystem =
    "You are {article} {language} linguist and specialize in\n"
    "{language} dependency analysis based on Universal\n"
    "Dependencies.";

inline constexpr std::string_view kOneStepUser =
    "We will now perform dependency parsing on {language}\n"
    "sentence. After splitting the input sentence into\n"
    "words as shown below, create a TSV with five fields:\n"
    "word index from 1 to {n} + word +  the Universal\n"
    "Dependencies part of speech + the dependent word\n"
    "index + the Universal Dependencies relation.\n"
    "However, for the word that is the main predicate of\n"
    "the sentence, the dependent word index should be 0.\n"
    "\n"
    "input sentence:\n"
    "{sentence}\n"
    "\n"
    "words:\n"
    "{words}";

inline constexpr std::string_view kTwoStepUser =
    "We will now perform dependency parsing on {language}\n"
    "sentence. After splitting the input sentence into\n"
    "words as shown below, execute following two\n"
    "tasks:\n"
    "\n"
    "- Task 1\n"
    "Create a TSV with three fields: word index from 1\n"
    "to {n} + word + part of speech.\n"
    "\n"
    "- Task 2\n"
    "Add a field for the dependent word indexes and a\n"
    "field for the Universal Dependencies relation\n"
    "labels to each row to the output of Task 1.\n"
    "However, for the word that is the main predicate\n"
    "of the sentence, the dependent word index should\n"
    "be 0.\n"
    "\n"
    "input sentence:\n"
    "{sentence}\n"
    "\n"
    "words:\n"
    "{words}";

inline constexpr std::string_view kThreeStepUser =
    "We will now perform dependency parsing on {language}\n"
    "sentence. After splitting the input sentence into\n"
    "words as shown below, execute following three\n"
    "tasks:\n"
    "\n"
    "- Task 1\n"
    "Create a TSV with three fields: word index from 1\n"
    "to {n} + word + part of speech.\n"
    "\n"
    "- Task 2\n"
    "Add a field for the dependent word indexes to\n"
    "each row to the output of Task 1. However, for\n"
    "the word that is the main predicate of the\n"
    "sentence, the dependent word index should be 0.\n"
    "\n"
    "- Task 3\n"
    "Add a field for the Universal Dependencies\n"
    "relation labels to the output of Task 2.\n"
    "\n"
    "input sentence:\n"
    "{sentence}\n"
    "\n"
    "words:\n"
    "{words}";

}  // namespace llmdep::templates::v1

#endif  // LLMDEP_SRC_PROMPT_TEMPLATES_H_
