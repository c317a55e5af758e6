#include "stsg/gateway.hpp"

namespace stsg {

namespace {

PromptTemplate make(const char* id, MediaSlot media, const char* text) {
  return PromptTemplate{id, text, media};
}

}  // namespace

TemplateRegistry TemplateRegistry::builtin() {
  TemplateRegistry registry;

  registry.add(make("scene_narrative", MediaSlot::Keyframe,
                    "[ INST ]\n"
                    "Describe the keyframe of the video in one sentence, ensuring to include "
                    "all main objects within the scene.\n"
                    "[ /INST ]"));

  registry.add(make(
      "object_extract", MediaSlot::None,
      "[ INST ]\n"
      "From the given sentence, the task is to extract meaningful objects. Note that the "
      "object is the entity or noun that being described in the sentence.\n"
      "Let's take a few examples to understand how to extract meaningful objects.\n"
      "\n"
      "Question: Given the sentence “Children play with red toys in the yard,” "
      "extract meaningful objects. Answer: Meaningful objects are [children, toys, yard].\n"
      "\n"
      "Question: Given the sentence “A beautiful woman walking a dog on top of a "
      "beach,” extract meaningful objects.\n"
      "\n"
      "Answer: Meaningful objects are [woman, dog, beach].\n"
      "\n"
      "Question: Given the sentence “A mix of black and white cat jumps over a old "
      "fence,” extract meaningful objects.\n"
      "\n"
      "Answer: Meaningful objects are [cat, fence].\n"
      "\n"
      "Please answer the following question.\n"
      "\n"
      "Question: Given the sentence “{sentence},” extract meaningful objects.\n"
      "\n"
      "Answer:\n"
      "[ /INST ]"));

  registry.add(make("quantity_unique", MediaSlot::Keyframe,
                    "[ INST ]\n"
                    "Given the object name: {object}, if there is more than one, please "
                    "provide the quantity and describe each instance of {object} with a "
                    "corresponding unique attribute. The unique attribute should be something "
                    "that only one instance has while the others do not. Use the following "
                    "format for the output:\n"
                    "\n"
                    "Object: {object}\n"
                    "Quantity: [number]\n"
                    "1. {object}1: [distinct unique attribute]\n"
                    "2. {object}2: [distinct unique attribute]\n"
                    "...\n"
                    "[ /INST ]"));

  registry.add(make("mobility", MediaSlot::Clip,
                    "[ INST ]\n"
                    "Given the object: {object}, determine if it is a static object or a "
                    "dynamic object.\n"
                    "Note that static objects refer to background objects that may not move "
                    "or change observably within a short time while dynamic objects are the "
                    "opposite.\n"
                    "If the object is static, print 'Static', otherwise print 'Dynamic', no "
                    "explanation is needed.\n"
                    "[ /INST ]"));

  registry.add(make("attribute_narrative", MediaSlot::Keyframe,
                    "[ INST ]\n"
                    "Given the object: {object}, describe its attributes in the scene using "
                    "one or two sentences that primarily include adjectives or present "
                    "participles (-ing forms). Avoid any irrelevant details or complex "
                    "explanations.\n"
                    "[ /INST ]"));

  registry.add(make(
      "attribute_extract", MediaSlot::None,
      "[ INST ]\n"
      "For the given sentence, the task is to extract meaningful attributes for the given "
      "object. Each attribute should include its type and value. Let's take a few examples "
      "to understand how to extract meaningful attributes.\n"
      "\n"
      "Question: Given the sentence “A woman with long and blonde hair is sitting on a "
      "park bench,” extract meaningful attributes for the object “woman”.\n"
      "\n"
      "Answer: [\"object\":\"woman\", \"attributes\":[\"hair\":\"long and blonde\", "
      "\"status\":\"sitting\"]]\n"
      "\n"
      "Question: Given the sentence “A tall man in a red jacket is walking down the "
      "street,” extract meaningful attributes for the object “man”.\n"
      "\n"
      "Answer: [\"object\":\"man\", \"attributes\":[\"height\":\"tall\", "
      "\"clothing\":\"red jacket\", \"action\":\"walking\"]]\n"
      "\n"
      "Question: Given the sentence “The blue car is parked,” extract meaningful "
      "object label and attributes for the object “car”\n"
      "\n"
      "Answer: [\"object\":\"car\", \"attributes\":[\"color\":\"blue\", "
      "\"status\":\"parked\"]]\n"
      "\n"
      "Please answer the following question.\n"
      "\n"
      "Question: Given the sentence “{sentence}.” Extract meaningful attributes "
      "for the object “{object}”\n"
      "\n"
      "Answer:\n"
      "[ /INST ]"));

  registry.add(make("relation_narrative", MediaSlot::Keyframe,
                    "[ INST ]\n"
                    "Given the object: {object} in the provided image, describe all spatial "
                    "or contact relationship between {object} and other objects {others} in "
                    "the image. Ensure the subject of every sentence is {object}, and do not "
                    "include detailed descriptions of other objects.\n"
                    "[ /INST ]"));

  registry.add(make(
      "triplet_extract", MediaSlot::None,
      "[ INST ]\n"
      "From the given sentence, the task is to extract meaningful triplets formed as "
      "<subject, predicate, object>. Note that the subject must be the given object, and "
      "the object is the entity or noun that is affected by the action or is receiving the "
      "action. The predicate is a verb or adjective without auxiliary verb, and is "
      "represented without the tense (e.g., are, being).\n"
      "Let's take a few examples to understand how to extract meaningful triplets.\n"
      "\n"
      "Question: Given the sentence “a slice of bread is covered with a sour cream and "
      "quacamole,” extract meaningful triplets for the given object “bread”.\n"
      "\n"
      "Answer: Meaningful triplets are <bread, covered with, sour cream>, <bread, covered "
      "with, guacamole>.\n"
      "\n"
      "Question: Given the sentence “A clock sitting on a floor next to a woman's "
      "feet,” extract meaningful triplets for the given object “clock”.\n"
      "\n"
      "Answer: Meaningful triplets are <clock, sitting on, floor>, <clock, next to, feet>.\n"
      "\n"
      "Question: Given the sentence “One person sits in a chair looking at her phone "
      "while another rests on the couch,” extract meaningful triplets for the given "
      "object “person”.\n"
      "\n"
      "Answer: Meaningful triplets are <person, sits in, chair>, <person, looking at, "
      "phone>, <person, rests on, couch>.\n"
      "\n"
      "Please answer the following question.\n"
      "\n"
      "Question: Given the sentence “{sentence},” extract meaningful triplets for "
      "the given object {object}.\n"
      "\n"
      "Answer:\n"
      "[ /INST ]"));

  registry.add(make("cross_frame_identity", MediaSlot::Clip,
                    "[ INST ]\n"
                    "For the given video, determine if {first} in the first half and {second} "
                    "in the second half are the same object. Just output 'Yes' or 'No'.\n"
                    "[ /INST ]"));

  registry.add(make("action_describe", MediaSlot::Clip,
                    "[ INST ]\n"
                    "Given the same object {first} in the first half video and {second} in "
                    "the second half video, describe the action of this object in the "
                    "video.\n"
                    "[ /INST ]"));

  registry.add(make(
      "action_extract", MediaSlot::None,
      "[ INST ]\n"
      "For the given sentence, the task is to extract meaningful action for the given "
      "object. The action should be described using a verb or verb phrase.\n"
      "Let's take a few examples to understand how to extract.\n"
      "\n"
      "Question: Given the sentence “The man walked on the street,” extract "
      "meaningful action for the object “man”.\n"
      "\n"
      "Answer: [\"action\":\"walking on the street\"]\n"
      "\n"
      "Question: Given the sentence “The cat jumped on the bed,” extract "
      "meaningful action for the object “cat”.\n"
      "\n"
      "Answer: [\"action\":\"jumping on the bed\"]\n"
      "\n"
      "Question: Given the sentence “The dog chased the ball in the park,” extract "
      "meaningful action for the object “dog”.\n"
      "\n"
      "Answer: [\"action\": \"chasing the ball in the park\"]\n"
      "\n"
      "Please answer the following question.\n"
      "\n"
      "Question: Given the sentence “{sentence},” extract meaningful action for "
      "the object “{object}”.\n"
      "\n"
      "Answer:\n"
      "[ /INST ]"));

  registry.add(make(
      "predicate_object_extract", MediaSlot::None,
      "[ INST ]\n"
      "For the given action, extract the predicate and object. The predicate is a verb or "
      "verb phrase, and the object is the entity or noun that is affected by the action.\n"
      "Let's take a few examples to understand how to extract.\n"
      "\n"
      "Question: Given the action “walking”, extract the predicate and object.\n"
      "\n"
      "Answer: [\"predicate\":\"walking\", \"object\":\"None\"]\n"
      "\n"
      "Question: Given the action “jumping on the bed”, extract the predicate and "
      "object.\n"
      "\n"
      "Answer: [\"predicate\":\"jumping on\", \"object\":\"bed\"]\n"
      "\n"
      "Question: Given the action “sitting on the chair”, extract the predicate "
      "and object.\n"
      "\n"
      "Answer: [\"predicate\":\"sitting on\", \"object\":\"chair\"]\n"
      "\n"
      "Please answer the following question.\n"
      "\n"
      "Question: Given the action “{action}”, extract the predicate and object.\n"
      "\n"
      "Answer:\n"
      "[ /INST ]"));

  registry.add(make("cross_clip_identity", MediaSlot::Clip,
                    "[ INST ]\n"
                    "For the given video, determine if {first} in the first clip and {second} "
                    "in the second clip are the same object. Just output 'Yes' or 'No'.\n"
                    "[ /INST ]"));

  registry.add(make("event_describe", MediaSlot::Clip,
                    "[ INST ]\n"
                    "Describe the video clip in one sentence, providing a holistic "
                    "description of the overall event taking place.\n"
                    "[ /INST ]"));

  // Verification runs twice with distinct phrasings; identical wording would
  // collapse both passes into one cached response.
  registry.add(make("verify_node_first", MediaSlot::Keyframe,
                    "[ INST ]\n"
                    "For the given keyframe, determine if the object {descriptor} is present "
                    "in the scene. Just output 'Yes' or 'No'.\n"
                    "[ /INST ]"));

  registry.add(make("verify_node_second", MediaSlot::Keyframe,
                    "[ INST ]\n"
                    "Look carefully at the given keyframe and confirm whether the object "
                    "{descriptor} actually appears in the scene. Just output 'Yes' or 'No'.\n"
                    "[ /INST ]"));

  registry.add(make("verify_relation_first", MediaSlot::Keyframe,
                    "[ INST ]\n"
                    "For the given keyframe, determine if the statement \"{statement}\" is "
                    "correct. Just output 'Yes' or 'No'.\n"
                    "[ /INST ]"));

  registry.add(make("verify_relation_second", MediaSlot::Keyframe,
                    "[ INST ]\n"
                    "Look carefully at the given keyframe and confirm whether the statement "
                    "\"{statement}\" holds. Just output 'Yes' or 'No'.\n"
                    "[ /INST ]"));

  registry.add(make(
      "qra_refine", MediaSlot::None,
      "[ INST ]\n"
      "I have the question “{q}”, the rationale “{r}”, and the answer "
      "“{a}” about the video.\n"
      "Due to template generation, these may contain grammatical errors, logical "
      "inconsistencies, or unclear semantics.\n"
      "Please correct them and return the improved version in JSON format : "
      "{\"Q\": \"question\", \"R\": \"rationale\", \"A\": \"answer\"}\n"
      "[ /INST ]"));

  return registry;
}

}  // namespace stsg
